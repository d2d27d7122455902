//! Seeded random-graph generators: Erdős–Rényi G(n, p), nonlinear
//! preferential attachment, and Watts–Strogatz rewiring.
//!
//! Each generator is a pure function of its [`GeneratorSpec`]. The streams
//! come from [`crate::rng::stream`], so the same spec always yields the same
//! adjacency.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::rng;

/// Tries per edge before a Watts–Strogatz rewire is abandoned.
pub const REWIRE_RETRIES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(alias = "er", alias = "erdos-renyi", alias = "ErdosRenyi")]
    ErdosRenyi,
    #[serde(alias = "ba", alias = "barabasi-albert", alias = "BarabasiAlbert")]
    BarabasiAlbert,
    #[serde(alias = "ws", alias = "watts-strogatz", alias = "WattsStrogatz")]
    WattsStrogatz,
}

impl Family {
    pub fn short_name(self) -> &'static str {
        match self {
            Family::ErdosRenyi => "er",
            Family::BarabasiAlbert => "ba",
            Family::WattsStrogatz => "ws",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "er" | "erdos-renyi" | "erdosrenyi" | "gnp" => Ok(Family::ErdosRenyi),
            "ba" | "barabasi-albert" | "barabasialbert" => Ok(Family::BarabasiAlbert),
            "ws" | "watts-strogatz" | "wattsstrogatz" => Ok(Family::WattsStrogatz),
            other => Err(format!(
                "unknown generator family {other:?} (expected er, ba or ws)"
            )),
        }
    }
}

/// Model parameters for one generator family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphModel {
    /// Every unordered pair is an edge independently with probability `p`.
    ErdosRenyi { n: usize, p: f64 },
    /// Growth from a single vertex; each arrival attaches `m` edges to
    /// distinct existing vertices drawn with weight `(degree + 1)^power`.
    BarabasiAlbert { n: usize, power: f64, m: usize },
    /// Ring lattice with `nei` neighbors per side, each edge rewired with probability `p`.
    WattsStrogatz { n: usize, nei: usize, p: f64 },
}

impl GraphModel {
    pub fn family(&self) -> Family {
        match self {
            GraphModel::ErdosRenyi { .. } => Family::ErdosRenyi,
            GraphModel::BarabasiAlbert { .. } => Family::BarabasiAlbert,
            GraphModel::WattsStrogatz { .. } => Family::WattsStrogatz,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            GraphModel::ErdosRenyi { n, .. }
            | GraphModel::BarabasiAlbert { n, .. }
            | GraphModel::WattsStrogatz { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |msg: String| Err(GeneratorError::InvalidSpec(msg));
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        match *self {
            GraphModel::ErdosRenyi { n, p } => {
                if n < 1 {
                    return bad("n must be at least 1".into());
                }
                if !prob_ok(p) {
                    return bad(format!("edge probability {p} outside [0, 1]"));
                }
            }
            GraphModel::BarabasiAlbert { n, power, m } => {
                if n < 2 {
                    return bad("preferential attachment needs n >= 2".into());
                }
                if m < 1 {
                    return bad("m must be at least 1".into());
                }
                if !(power >= 0.0 && power.is_finite()) {
                    return bad(format!("attachment power {power} must be finite and >= 0"));
                }
            }
            GraphModel::WattsStrogatz { n, nei, p } => {
                if n < 1 {
                    return bad("n must be at least 1".into());
                }
                if nei < 1 {
                    return bad("nei must be at least 1".into());
                }
                if nei > (n - 1) / 2 {
                    return bad(format!(
                        "ring lattice with nei={nei} per side needs n >= {}, got n={n}",
                        2 * nei + 1
                    ));
                }
                if !prob_ok(p) {
                    return bad(format!("rewiring probability {p} outside [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub model: GraphModel,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(model: GraphModel, seed: u64) -> Self {
        GeneratorSpec { model, seed }
    }

    pub fn generate(&self) -> Result<(Graph, GenerationReport), GeneratorError> {
        match self.model {
            GraphModel::ErdosRenyi { n, p } => {
                generate_er(n, p, self.seed).map(|g| (g, GenerationReport::default()))
            }
            GraphModel::BarabasiAlbert { n, power, m } => {
                generate_ba(n, power, m, self.seed).map(|g| (g, GenerationReport::default()))
            }
            GraphModel::WattsStrogatz { n, nei, p } => generate_ws_with_report(n, nei, p, self.seed),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

/// Side information from generation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GenerationReport {
    /// Rewires drawn but abandoned after [`REWIRE_RETRIES`] rejected targets.
    pub rewires_skipped: usize,
    /// Rewires that moved an edge.
    pub rewires_applied: usize,
}

fn build(n: usize, edges: Vec<(usize, usize)>) -> Graph {
    Graph::from_edges(n, edges)
        .expect("generator endpoints are in range")
        .0
}

/// G(n, p): pairs visited as (i, j), i < j, in lexicographic order.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<Graph, GeneratorError> {
    GraphModel::ErdosRenyi { n, p }.validate()?;
    let mut rng = rng::stream(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(build(n, edges))
}

/// Nonlinear preferential attachment starting from vertex 0 alone.
///
/// Vertex `t` arrives at step `t` and attaches to `min(m, t)` distinct
/// earlier vertices, drawn one at a time without replacement with weight
/// `(degree + 1)^power`.
pub fn generate_ba(n: usize, power: f64, m: usize, seed: u64) -> Result<Graph, GeneratorError> {
    GraphModel::BarabasiAlbert { n, power, m }.validate()?;
    let mut rng = rng::stream(seed);
    let mut degree = vec![0usize; n];
    let mut weight = vec![0f64; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1) * m);
    let mut chosen = Vec::with_capacity(m);

    for t in 1..n {
        chosen.clear();
        if m >= t {
            chosen.extend(0..t);
        } else {
            for (w, &d) in weight[..t].iter_mut().zip(&degree[..t]) {
                *w = ((d + 1) as f64).powf(power);
            }
            for _ in 0..m {
                let total: f64 = weight[..t].iter().sum();
                let target = pick_weighted(&weight[..t], total, &mut rng);
                weight[target] = 0.0;
                chosen.push(target);
            }
        }
        for &u in &chosen {
            degree[u] += 1;
            degree[t] += 1;
            edges.push((u, t));
        }
    }
    Ok(build(n, edges))
}

fn pick_weighted<R: Rng>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let mut x = rng.random::<f64>() * total;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        if x < w {
            return i;
        }
        x -= w;
        last_positive = i;
    }
    // Rounding left a sliver past the final bucket.
    last_positive
}

/// Watts–Strogatz small world.
pub fn generate_ws(n: usize, nei: usize, p: f64, seed: u64) -> Result<Graph, GeneratorError> {
    generate_ws_with_report(n, nei, p, seed).map(|(g, _)| g)
}

/// Watts–Strogatz with rewiring counters.
///
/// Lattice edges `(i, i + j mod n)` are visited for `j = 1..=nei`, then
/// `i = 0..n`. A selected edge keeps `i` and replaces its far endpoint with a
/// uniform vertex; self-loops and existing edges are re-drawn up to
/// [`REWIRE_RETRIES`] times before the rewire is skipped.
pub fn generate_ws_with_report(
    n: usize,
    nei: usize,
    p: f64,
    seed: u64,
) -> Result<(Graph, GenerationReport), GeneratorError> {
    GraphModel::WattsStrogatz { n, nei, p }.validate()?;
    let mut rng = rng::stream(seed);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=nei {
            let w = (i + j) % n;
            adj[i].insert(w);
            adj[w].insert(i);
        }
    }
    let mut report = GenerationReport::default();
    for j in 1..=nei {
        for i in 0..n {
            let far = (i + j) % n;
            if rng.random::<f64>() >= p {
                continue;
            }
            if adj[i].len() >= n - 1 {
                report.rewires_skipped += 1;
                continue;
            }
            let mut target = None;
            for _ in 0..REWIRE_RETRIES {
                let w = rng.random_range(0..n);
                if w != i && !adj[i].contains(&w) {
                    target = Some(w);
                    break;
                }
            }
            match target {
                Some(w) => {
                    adj[i].remove(&far);
                    adj[far].remove(&i);
                    adj[i].insert(w);
                    adj[w].insert(i);
                    report.rewires_applied += 1;
                }
                None => report.rewires_skipped += 1,
            }
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, ns)| ns.range(u + 1..).map(move |&w| (u, w)))
        .collect();
    Ok((build(n, edges), report))
}
