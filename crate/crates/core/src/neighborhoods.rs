//! Extended-neighborhood construction under competing semantics.
//!
//! For a focal vertex `v` and depth `k`:
//!
//! * [`SemanticsKind::ShortestExactlyK`] ("strictly k") keeps the vertices at
//!   shortest-path distance exactly `k`.
//! * [`SemanticsKind::PathExactlyK`] ("k and below") keeps every vertex other
//!   than `v` that ends some trail (edge-non-repeating walk) of length exactly
//!   `k` from `v`. At `k = 2` this is the union of the neighbors' adjacency
//!   lists minus `v`, so direct friends that share a friend with `v` are in.
//! * [`SemanticsKind::PathCountK`] counts the length-2 trails from `v`, with
//!   multiplicity, instead of collecting their endpoints.
//!
//! Trails of length 3 are an extrapolation of the length-2 definition;
//! nothing beyond `k = 3` is supported for the trail semantics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId};

pub mod oracle;

/// Largest `k` supported by [`neighbors_path_k`].
pub const MAX_TRAIL_K: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SemanticsKind {
    /// Vertices whose shortest-path distance is exactly k.
    #[serde(rename = "strict", alias = "shortest", alias = "ShortestExactlyK")]
    ShortestExactlyK,
    /// Endpoints of trails of length exactly k, focal vertex excluded.
    #[serde(rename = "path", alias = "PathExactlyK")]
    PathExactlyK,
    /// Number of length-k trails that do not return to the focal vertex.
    #[serde(rename = "count", alias = "PathCountK")]
    PathCountK,
}

impl SemanticsKind {
    pub const SET_VALUED: [SemanticsKind; 2] = [SemanticsKind::ShortestExactlyK, SemanticsKind::PathExactlyK];

    pub fn is_set_valued(self) -> bool {
        !matches!(self, SemanticsKind::PathCountK)
    }

    /// Stable name used in CSV output and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            SemanticsKind::ShortestExactlyK => "strict",
            SemanticsKind::PathExactlyK => "path",
            SemanticsKind::PathCountK => "count",
        }
    }

    /// The other set-valued semantics.
    pub fn counterpart(self) -> Option<SemanticsKind> {
        match self {
            SemanticsKind::ShortestExactlyK => Some(SemanticsKind::PathExactlyK),
            SemanticsKind::PathExactlyK => Some(SemanticsKind::ShortestExactlyK),
            SemanticsKind::PathCountK => None,
        }
    }
}

impl fmt::Display for SemanticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SemanticsKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strict" | "strictly" | "shortest" | "shortestexactlyk" | "strictly-2" => {
                Ok(SemanticsKind::ShortestExactlyK)
            }
            "path" | "pathexactlyk" | "2and1" | "2-and-1" => Ok(SemanticsKind::PathExactlyK),
            "count" | "pathcountk" | "non-unique" => Ok(SemanticsKind::PathCountK),
            other => Err(format!(
                "unknown semantics {other:?} (expected strict, path or count)"
            )),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NeighborhoodError {
    #[error("{kind} semantics does not support k = {k}")]
    UnsupportedK { kind: SemanticsKind, k: usize },
}

/// Extended neighborhood of one focal vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborSet {
    pub focal: VertexId,
    pub k: usize,
    pub kind: SemanticsKind,
    /// Sorted, duplicate-free; empty for [`SemanticsKind::PathCountK`].
    pub members: Vec<VertexId>,
    /// Trail count for [`SemanticsKind::PathCountK`], `members.len()` otherwise.
    pub count: usize,
}

impl NeighborSet {
    fn from_members(focal: VertexId, k: usize, kind: SemanticsKind, members: Vec<VertexId>) -> Self {
        let count = members.len();
        NeighborSet {
            focal,
            k,
            kind,
            members,
            count,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Reusable per-worker buffers for neighborhood construction.
///
/// Membership marks are epoch-stamped so a query costs time proportional
/// to the work it does, not to the size of the graph.
#[derive(Clone, Debug, Default)]
pub struct NeighborhoodScratch {
    stamp: Vec<u32>,
    epoch: u32,
    frontier: Vec<VertexId>,
    next: Vec<VertexId>,
    // Depth-3 walk: middle vertices expanded once / twice.
    aux_once: Vec<u32>,
    aux_twice: Vec<u32>,
    aux_epoch: u32,
}

impl NeighborhoodScratch {
    pub fn new(vertex_count: usize) -> Self {
        NeighborhoodScratch {
            stamp: vec![0; vertex_count],
            epoch: 0,
            frontier: Vec::new(),
            next: Vec::new(),
            aux_once: Vec::new(),
            aux_twice: Vec::new(),
            aux_epoch: 0,
        }
    }

    fn begin(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }

    /// Marks `v`; true when it was not yet marked in this epoch.
    #[inline]
    fn mark(&mut self, v: VertexId) -> bool {
        let slot = &mut self.stamp[v.index()];
        if *slot == self.epoch {
            false
        } else {
            *slot = self.epoch;
            true
        }
    }

    fn begin_aux(&mut self, n: usize) {
        if self.aux_once.len() < n {
            self.aux_once.resize(n, 0);
            self.aux_twice.resize(n, 0);
        }
        self.aux_epoch = self.aux_epoch.wrapping_add(1);
        if self.aux_epoch == 0 {
            self.aux_once.fill(0);
            self.aux_twice.fill(0);
            self.aux_epoch = 1;
        }
    }

    /// Vertices at shortest-path distance exactly `k` from `v`.
    pub fn shortest_k(&mut self, g: &Graph, v: VertexId, k: usize) -> NeighborSet {
        let kind = SemanticsKind::ShortestExactlyK;
        if k == 0 {
            return NeighborSet::from_members(v, 0, kind, vec![v]);
        }
        let n = g.vertex_count();
        self.begin(n);
        self.mark(v);
        let mut visited = 1;
        self.frontier.clear();
        self.frontier.push(v);
        for _ in 0..k {
            self.next.clear();
            let frontier = std::mem::take(&mut self.frontier);
            'level: for &u in &frontier {
                for &w in g.neighbors(u) {
                    if self.mark(w) {
                        self.next.push(w);
                        visited += 1;
                        if visited == n {
                            break 'level;
                        }
                    }
                }
            }
            self.frontier = frontier;
            std::mem::swap(&mut self.frontier, &mut self.next);
            if self.frontier.is_empty() {
                break;
            }
        }
        let mut members = std::mem::take(&mut self.frontier);
        members.sort_unstable();
        let set = NeighborSet::from_members(v, k, kind, members.clone());
        members.clear();
        self.frontier = members;
        set
    }

    /// Endpoints other than `v` of trails of length exactly `k`, `1 <= k <= 3`.
    pub fn path_k(&mut self, g: &Graph, v: VertexId, k: usize) -> Result<NeighborSet, NeighborhoodError> {
        let kind = SemanticsKind::PathExactlyK;
        let members = match k {
            1 => g.neighbors(v).to_vec(),
            2 => self.two_step(g, v),
            3 => self.three_step(g, v),
            _ => return Err(NeighborhoodError::UnsupportedK { kind, k }),
        };
        Ok(NeighborSet::from_members(v, k, kind, members))
    }

    /// Union of `adj(u)` over `u` in `adj(v)`, without `v`.
    fn two_step(&mut self, g: &Graph, v: VertexId) -> Vec<VertexId> {
        let n = g.vertex_count();
        self.begin(n);
        self.mark(v);
        let mut out = Vec::new();
        'outer: for &u in g.neighbors(v) {
            for &w in g.neighbors(u) {
                if self.mark(w) {
                    out.push(w);
                    if out.len() + 1 == n {
                        break 'outer;
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Endpoints of trails v-a-b-w. In a simple graph the three edges are
    /// distinct exactly when b != v and w != a; w == v is dropped as focal.
    fn three_step(&mut self, g: &Graph, v: VertexId) -> Vec<VertexId> {
        let n = g.vertex_count();
        self.begin(n);
        self.mark(v);
        self.begin_aux(n);
        let mut out = Vec::new();
        'outer: for &a in g.neighbors(v) {
            for &b in g.neighbors(a) {
                if b == v {
                    continue;
                }
                // Once b has been expanded from two different a's, every
                // neighbor of b is already in.
                let slot = b.index();
                if self.aux_twice[slot] == self.aux_epoch {
                    continue;
                }
                if self.aux_once[slot] == self.aux_epoch {
                    self.aux_twice[slot] = self.aux_epoch;
                } else {
                    self.aux_once[slot] = self.aux_epoch;
                }
                for &w in g.neighbors(b) {
                    if w != a && self.mark(w) {
                        out.push(w);
                        if out.len() + 1 == n {
                            break 'outer;
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Dispatch on `kind`.
    pub fn neighborhood(
        &mut self,
        g: &Graph,
        v: VertexId,
        k: usize,
        kind: SemanticsKind,
    ) -> Result<NeighborSet, NeighborhoodError> {
        match kind {
            SemanticsKind::ShortestExactlyK => Ok(self.shortest_k(g, v, k)),
            SemanticsKind::PathExactlyK => self.path_k(g, v, k),
            SemanticsKind::PathCountK => {
                let count = path_count_k(g, v, k)?;
                Ok(NeighborSet {
                    focal: v,
                    k,
                    kind,
                    members: Vec::new(),
                    count,
                })
            }
        }
    }
}

/// Vertices at shortest-path distance exactly `k` from `v`; `k = 0` gives `{v}`.
pub fn neighbors_shortest_k(g: &Graph, v: VertexId, k: usize) -> NeighborSet {
    NeighborhoodScratch::new(g.vertex_count()).shortest_k(g, v, k)
}

/// Vertices other than `v` reachable by a trail of length exactly `k`.
pub fn neighbors_path_k(g: &Graph, v: VertexId, k: usize) -> Result<NeighborSet, NeighborhoodError> {
    NeighborhoodScratch::new(g.vertex_count()).path_k(g, v, k)
}

/// Number of length-2 trails from `v`: `Σ_{u ∈ adj(v)} (deg(u) − 1)`.
pub fn path_count_k(g: &Graph, v: VertexId, k: usize) -> Result<usize, NeighborhoodError> {
    if k != 2 {
        return Err(NeighborhoodError::UnsupportedK {
            kind: SemanticsKind::PathCountK,
            k,
        });
    }
    Ok(g.neighbors(v).iter().map(|&u| g.degree(u) - 1).sum())
}

/// Neighborhood of `v` under any semantics.
pub fn neighborhood(
    g: &Graph,
    v: VertexId,
    k: usize,
    kind: SemanticsKind,
) -> Result<NeighborSet, NeighborhoodError> {
    NeighborhoodScratch::new(g.vertex_count()).neighborhood(g, v, k, kind)
}
