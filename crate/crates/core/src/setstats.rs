//! Jaccard distance between neighborhood semantics, per vertex and per graph.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::neighborhoods::{NeighborSet, NeighborhoodError, NeighborhoodScratch, SemanticsKind};
use crate::scalar::Real;

/// Vertices per reduction block. Fixed so the summation order does not
/// depend on how many workers run.
const BLOCK: usize = 1024;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetStatsError {
    #[error("{0} semantics is count-valued; Jaccard distance needs sets")]
    CountValued(SemanticsKind),
    #[error("sets belong to different focal vertices ({0} vs {1})")]
    FocalMismatch(VertexId, VertexId),
    #[error(transparent)]
    Neighborhood(#[from] NeighborhoodError),
}

/// Graph-level Jaccard statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct JaccardSummary<F> {
    /// Mean over all vertices; both-empty vertices contribute 0.
    pub mean: F,
    pub max: F,
    /// Mean over vertices where at least one set is non-empty.
    pub mean_nonempty: F,
    pub n_both_empty: usize,
    pub vertex_count: usize,
    pub per_node: Option<Vec<F>>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct JaccardOptions {
    pub retain_per_node: bool,
}

/// `|a ∩ b|` for sorted, duplicate-free slices.
pub fn sorted_intersection_len(a: &[VertexId], b: &[VertexId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn distance<F: Real>(a: &[VertexId], b: &[VertexId]) -> F {
    let inter = sorted_intersection_len(a, b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return F::zero();
    }
    F::one() - F::from_count(inter) / F::from_count(union)
}

/// `1 − |A ∩ B| / |A ∪ B|`, with `J(∅, ∅) = 0`.
pub fn jaccard_distance<F: Real>(a: &NeighborSet, b: &NeighborSet) -> Result<F, SetStatsError> {
    for s in [a, b] {
        if !s.kind.is_set_valued() {
            return Err(SetStatsError::CountValued(s.kind));
        }
    }
    if a.focal != b.focal {
        return Err(SetStatsError::FocalMismatch(a.focal, b.focal));
    }
    Ok(distance(&a.members, &b.members))
}

/// Per-vertex Jaccard distance between two semantics, summarized over the graph.
pub fn jaccard_graph<F: Real>(
    g: &Graph,
    kind_a: SemanticsKind,
    kind_b: SemanticsKind,
    k: usize,
) -> Result<JaccardSummary<F>, SetStatsError> {
    jaccard_graph_with(g, kind_a, kind_b, k, JaccardOptions::default())
}

#[derive(Clone, Copy)]
struct BlockStats<F> {
    sum: F,
    max: F,
    both_empty: usize,
}

pub fn jaccard_graph_with<F: Real>(
    g: &Graph,
    kind_a: SemanticsKind,
    kind_b: SemanticsKind,
    k: usize,
    options: JaccardOptions,
) -> Result<JaccardSummary<F>, SetStatsError> {
    for kind in [kind_a, kind_b] {
        if !kind.is_set_valued() {
            return Err(SetStatsError::CountValued(kind));
        }
    }
    let n = g.vertex_count();
    if n > 0 {
        // Surface unsupported depths before fanning out.
        let mut scratch = NeighborhoodScratch::new(n);
        scratch.neighborhood(g, VertexId(0), k, kind_a)?;
        scratch.neighborhood(g, VertexId(0), k, kind_b)?;
    }

    let blocks = n.div_ceil(BLOCK);
    let results: Vec<(BlockStats<F>, Vec<F>)> = (0..blocks)
        .into_par_iter()
        .map_init(
            || NeighborhoodScratch::new(n),
            |scratch, b| {
                let lo = b * BLOCK;
                let hi = (lo + BLOCK).min(n);
                let mut stats = BlockStats {
                    sum: F::zero(),
                    max: F::zero(),
                    both_empty: 0,
                };
                let mut values = Vec::with_capacity(if options.retain_per_node { hi - lo } else { 0 });
                for i in lo..hi {
                    let v = VertexId::new(i);
                    let a = scratch.neighborhood(g, v, k, kind_a).expect("depth checked");
                    let b = scratch.neighborhood(g, v, k, kind_b).expect("depth checked");
                    if a.is_empty() && b.is_empty() {
                        stats.both_empty += 1;
                    }
                    let d: F = distance(&a.members, &b.members);
                    stats.sum = stats.sum + d;
                    if d > stats.max {
                        stats.max = d;
                    }
                    if options.retain_per_node {
                        values.push(d);
                    }
                }
                (stats, values)
            },
        )
        .collect();

    let mut sum = F::zero();
    let mut max = F::zero();
    let mut n_both_empty = 0;
    let mut per_node = options.retain_per_node.then(|| Vec::with_capacity(n));
    for (stats, values) in results {
        sum = sum + stats.sum;
        if stats.max > max {
            max = stats.max;
        }
        n_both_empty += stats.both_empty;
        if let Some(all) = per_node.as_mut() {
            all.extend(values);
        }
    }
    let mean = if n == 0 { F::zero() } else { sum / F::from_count(n) };
    let nonempty = n - n_both_empty;
    let mean_nonempty = if nonempty == 0 {
        F::zero()
    } else {
        sum / F::from_count(nonempty)
    };
    Ok(JaccardSummary {
        mean,
        max,
        mean_nonempty,
        n_both_empty,
        vertex_count: n,
        per_node,
    })
}
