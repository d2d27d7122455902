//! Immutable simple undirected graphs and SNAP edge-list I/O.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use thiserror::Error;

/// Dense vertex index in `[0, vertex_count)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn new(index: usize) -> Self {
        VertexId(u32::try_from(index).expect("vertex index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: malformed token {token:?}")]
    Parse { line: usize, token: String },
    #[error("line {line}: expected two vertex labels, found {found}")]
    Arity { line: usize, found: usize },
    #[error("edge ({u}, {v}) references a vertex outside [0, {n})")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("graph has more than u32::MAX vertices")]
    TooLarge,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// What construction threw away.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    /// Data lines read (comments and blank lines excluded).
    pub lines: usize,
    /// Self-loop lines dropped.
    pub self_loops_dropped: usize,
    /// Distinct vertices that carried at least one self-loop.
    pub distinct_self_loops: usize,
    /// Non-loop lines that repeated an edge already seen, in either direction.
    pub duplicates_dropped: usize,
}

/// Simple undirected graph in compressed sparse row form.
///
/// Adjacency lists are strictly increasing, symmetric and loop-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    labels: Option<Vec<u64>>,
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            labels: None,
        }
    }

    /// Builds a simple graph on `n` vertices, dropping loops and repeated edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Self, LoadReport), GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(GraphError::TooLarge);
        }
        let mut pairs = Vec::new();
        let mut loops = Vec::new();
        let mut lines = 0;
        for (u, v) in edges {
            lines += 1;
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { u, v, n });
            }
            if u == v {
                loops.push(u as u32);
            } else {
                pairs.push((u.min(v) as u32, u.max(v) as u32));
            }
        }
        Ok(Self::from_normalized(n, pairs, loops, lines))
    }

    fn from_normalized(
        n: usize,
        mut pairs: Vec<(u32, u32)>,
        mut loops: Vec<u32>,
        lines: usize,
    ) -> (Self, LoadReport) {
        let raw = pairs.len();
        pairs.sort_unstable();
        pairs.dedup();
        let self_loops_dropped = loops.len();
        loops.sort_unstable();
        loops.dedup();

        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        // Pairs are sorted by (min, max): every vertex receives its smaller
        // neighbors first, in increasing order, then its larger ones.
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![VertexId(0); offsets[n]];
        for &(u, v) in &pairs {
            targets[cursor[u as usize]] = VertexId(v);
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = VertexId(u);
            cursor[v as usize] += 1;
        }
        let report = LoadReport {
            lines,
            self_loops_dropped,
            distinct_self_loops: loops.len(),
            duplicates_dropped: raw - pairs.len(),
        };
        (
            Graph {
                offsets,
                targets,
                labels: None,
            },
            report,
        )
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Undirected edges, each counted once.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Sorted neighbors of `v`.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let i = v.index();
        assert!(
            i < self.vertex_count(),
            "vertex {i} out of range for graph with {} vertices",
            self.vertex_count()
        );
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.vertex_count() as u32).map(VertexId)
    }

    /// Every undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&w| w > u)
                .map(move |w| (u, w))
        })
    }

    /// External label of `v`; the dense index when the graph was not loaded from a file.
    pub fn label(&self, v: VertexId) -> u64 {
        match &self.labels {
            Some(labels) => labels[v.index()],
            None => v.0 as u64,
        }
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    /// Checks every structural invariant; returns the first violation found.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.vertex_count();
        if !self.targets.len().is_multiple_of(2) {
            return Err("odd adjacency total".into());
        }
        for v in self.vertices() {
            let adj = self.neighbors(v);
            for w in adj.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("adjacency of {v} not strictly increasing"));
                }
            }
            for &w in adj {
                if w.index() >= n {
                    return Err(format!("neighbor {w} of {v} out of range"));
                }
                if w == v {
                    return Err(format!("self-loop at {v}"));
                }
                if !self.has_edge(w, v) {
                    return Err(format!("edge {v}-{w} not symmetric"));
                }
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err("label table length mismatch".into());
            }
        }
        Ok(())
    }

    /// Writes a SNAP-style edge list using external labels.
    ///
    /// Isolated vertices have no line to live on and are not written.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# Undirected simple graph")?;
        writeln!(
            out,
            "# Nodes: {} Edges: {}",
            self.vertex_count(),
            self.edge_count()
        )?;
        writeln!(out, "# FromNodeId\tToNodeId")?;
        for (u, v) in self.edges() {
            writeln!(out, "{}\t{}", self.label(u), self.label(v))?;
        }
        out.flush()
    }
}

/// A graph read from an edge list, with what was dropped on the way in.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub report: LoadReport,
}

impl LoadedGraph {
    /// Edge count under the SNAP convention, which keeps each distinct
    /// self-loop as one edge.
    pub fn snap_edge_count(&self) -> usize {
        self.graph.edge_count() + self.report.distinct_self_loops
    }
}

/// Parses a SNAP plain-text edge list.
///
/// Vertex labels are relabeled densely in order of first appearance. Empty
/// input yields an empty graph.
pub fn load_edge_list<R: BufRead>(mut source: R) -> Result<LoadedGraph, GraphError> {
    let mut ids: HashMap<u64, u32> = HashMap::new();
    let mut labels: Vec<u64> = Vec::new();
    let mut pairs = Vec::new();
    let mut loops = Vec::new();
    let mut lines = 0;
    let mut buf = String::new();
    let mut line_no = 0;

    let mut intern = |label: u64, labels: &mut Vec<u64>| -> Result<u32, GraphError> {
        if let Some(&id) = ids.get(&label) {
            return Ok(id);
        }
        let id = u32::try_from(labels.len()).map_err(|_| GraphError::TooLarge)?;
        ids.insert(label, id);
        labels.push(label);
        Ok(id)
    };

    loop {
        buf.clear();
        if source.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = buf.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_ascii_whitespace();
        let mut endpoint = || -> Result<Option<u64>, GraphError> {
            tokens
                .next()
                .map(|t| {
                    t.parse::<u64>().map_err(|_| GraphError::Parse {
                        line: line_no,
                        token: t.to_string(),
                    })
                })
                .transpose()
        };
        let (a, b) = match (endpoint()?, endpoint()?) {
            (Some(a), Some(b)) => (a, b),
            (first, _) => {
                return Err(GraphError::Arity {
                    line: line_no,
                    found: first.is_some() as usize,
                })
            }
        };
        let extra = tokens.count();
        if extra > 0 {
            return Err(GraphError::Arity {
                line: line_no,
                found: 2 + extra,
            });
        }
        lines += 1;
        let u = intern(a, &mut labels)?;
        let v = intern(b, &mut labels)?;
        if u == v {
            loops.push(u);
        } else {
            pairs.push((u.min(v), u.max(v)));
        }
    }

    let (mut graph, report) = Graph::from_normalized(labels.len(), pairs, loops, lines);
    graph.labels = Some(labels);
    Ok(LoadedGraph { graph, report })
}

/// Loads an edge-list file, decompressing when the name ends in `.gz`.
pub fn load_edge_list_path(path: impl AsRef<Path>) -> Result<LoadedGraph, GraphError> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let gz = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    if gz {
        load_edge_list(BufReader::with_capacity(1 << 20, MultiGzDecoder::new(file)))
    } else {
        load_edge_list(BufReader::with_capacity(1 << 20, file))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    pub fn triangle() -> Graph {
        graph(3, &[(0, 1), (0, 2), (1, 2)])
    }

    /// 0 - 1 - 2
    pub fn path3() -> Graph {
        graph(3, &[(0, 1), (1, 2)])
    }

    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        graph(leaves + 1, &edges)
    }
}
