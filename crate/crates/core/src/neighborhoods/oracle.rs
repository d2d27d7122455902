//! Brute-force reference for the neighborhood semantics.
//!
//! Trails are enumerated exhaustively over an edge list with explicit
//! edge-use tracking, and distances come from powers of a boolean adjacency
//! matrix. Nothing here shares code with the fast paths; it is meant for
//! graphs of a dozen vertices or so.

use std::collections::BTreeSet;

use super::{NeighborSet, SemanticsKind};
use crate::graph::{Graph, VertexId};

/// Computes the same contract as the fast operations by exhaustive search.
///
/// Unlike the fast paths it accepts any `k` for every semantics.
pub fn oracle_neighbors(g: &Graph, v: VertexId, k: usize, kind: SemanticsKind) -> NeighborSet {
    let n = g.vertex_count();
    let edges: Vec<(usize, usize)> = g.edges().map(|(a, b)| (a.index(), b.index())).collect();
    let focal = v.index();
    let (members, count) = match kind {
        SemanticsKind::ShortestExactlyK => {
            let members = exact_distance(n, &edges, focal, k);
            let c = members.len();
            (members, c)
        }
        SemanticsKind::PathExactlyK => {
            let ends = trail_ends(&edges, focal, k);
            let distinct: BTreeSet<usize> = ends.into_iter().filter(|&w| w != focal).collect();
            let members: Vec<usize> = distinct.into_iter().collect();
            let c = members.len();
            (members, c)
        }
        SemanticsKind::PathCountK => {
            let ends = trail_ends(&edges, focal, k);
            (Vec::new(), ends.into_iter().filter(|&w| w != focal).count())
        }
    };
    NeighborSet {
        focal: v,
        k,
        kind,
        members: members.into_iter().map(VertexId::new).collect(),
        count,
    }
}

/// Endpoint of every trail of length exactly `k` from `start`, with multiplicity.
fn trail_ends(edges: &[(usize, usize)], start: usize, k: usize) -> Vec<usize> {
    let mut used = vec![false; edges.len()];
    let mut ends = Vec::new();
    extend(edges, &mut used, start, k, &mut ends);
    ends
}

fn extend(edges: &[(usize, usize)], used: &mut [bool], at: usize, left: usize, ends: &mut Vec<usize>) {
    if left == 0 {
        ends.push(at);
        return;
    }
    for (i, &(a, b)) in edges.iter().enumerate() {
        if used[i] {
            continue;
        }
        let next = if a == at {
            b
        } else if b == at {
            a
        } else {
            continue;
        };
        used[i] = true;
        extend(edges, used, next, left - 1, ends);
        used[i] = false;
    }
}

/// Vertices reachable by a walk of length <= k but not <= k - 1.
fn exact_distance(n: usize, edges: &[(usize, usize)], start: usize, k: usize) -> Vec<usize> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    // within[j][w]: some walk of length <= j reaches w.
    let mut within = vec![vec![false; n]; k + 1];
    within[0][start] = true;
    for j in 1..=k {
        for w in 0..n {
            within[j][w] = within[j - 1][w] || (0..n).any(|u| within[j - 1][u] && adj[u][w]);
        }
    }
    (0..n)
        .filter(|&w| within[k][w] && (k == 0 || !within[k - 1][w]))
        .collect()
}
