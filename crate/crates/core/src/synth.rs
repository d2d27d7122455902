//! Synthetic treatment/outcome attributes for peer-effect experiments.
//!
//! Treatments are drawn `T_v ~ N(mu, sigma)` with `mu ~ U(-5, 5)` and
//! `sigma ~ U(0, 3)` drawn once per call. Outcomes follow
//! `O_v = agg(T over the friends-of-friends of v) + epsilon * z_v`.
//! Per-vertex draws come from streams keyed by vertex id, so generation
//! does not depend on evaluation order.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::neighborhoods::{NeighborSet, NeighborhoodScratch, SemanticsKind};
use crate::rng;
use crate::scalar::Real;

/// Friends-of-friends depth used by the generative model.
pub const FOF_DEPTH: usize = 2;

/// Stream index reserved for the network-level (mu, sigma) draw.
const PARAM_STREAM: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggKind {
    /// Arithmetic mean of member values; 0 for the empty set.
    Mean,
    /// Set cardinality.
    Degree,
}

impl AggKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AggKind::Mean => "mean",
            AggKind::Degree => "degree",
        }
    }
}

impl fmt::Display for AggKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AggKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mean" | "avg" => Ok(AggKind::Mean),
            "degree" | "size" | "count" => Ok(AggKind::Degree),
            other => Err(format!("unknown aggregation {other:?} (expected mean or degree)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{0} semantics is count-valued and cannot drive an aggregate")]
    CountValued(SemanticsKind),
    #[error("treatment has {got} values for a graph with {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("attribute csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parameters an attribute table was generated with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams<F> {
    pub mu: F,
    pub sigma: F,
    pub epsilon: F,
    pub agg: AggKind,
    pub semantics: SemanticsKind,
    pub seed: u64,
}

/// Per-vertex treatment and outcome for one synthetic trial.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributeTable<F> {
    pub treatment: Vec<F>,
    pub outcome: Vec<F>,
    pub params: GenParams<F>,
}

/// Treatment vector with the distribution it was drawn from.
#[derive(Clone, Debug, PartialEq)]
pub struct Treatment<F> {
    pub values: Vec<F>,
    pub mu: F,
    pub sigma: F,
}

fn vertex_noise<F: Real>(seed: u64, v: usize) -> F {
    F::standard_normal(&mut rng::stream(rng::mix(seed, v as u64)))
}

/// Draws `mu ~ U(-5, 5)`, `sigma ~ U(0, 3)`, then `T_v ~ N(mu, sigma)` per vertex.
pub fn gen_treatment<F: Real>(g: &Graph, seed: u64) -> Treatment<F> {
    let mut params = rng::stream(rng::mix(seed, PARAM_STREAM));
    let mu = F::uniform(&mut params, F::lit(-5.0), F::lit(5.0));
    let sigma = F::uniform(&mut params, F::zero(), F::lit(3.0));
    Treatment {
        values: treatment_with(g.vertex_count(), mu, sigma, seed),
        mu,
        sigma,
    }
}

/// `T_v = mu + sigma * z_v` with the per-vertex streams of `seed`.
pub fn treatment_with<F: Real>(n: usize, mu: F, sigma: F, seed: u64) -> Vec<F> {
    (0..n)
        .into_par_iter()
        .map(|v| mu + sigma * vertex_noise::<F>(seed, v))
        .collect()
}

/// Aggregate of `values` over the members of `set`.
pub fn aggregate<F: Real>(values: &[F], set: &NeighborSet, agg: AggKind) -> F {
    aggregate_members(values, &set.members, agg)
}

pub(crate) fn aggregate_members<F: Real>(values: &[F], members: &[VertexId], agg: AggKind) -> F {
    match agg {
        AggKind::Degree => F::from_count(members.len()),
        AggKind::Mean if members.is_empty() => F::zero(),
        AggKind::Mean => {
            let sum: F = members.iter().map(|m| values[m.index()]).sum();
            sum / F::from_count(members.len())
        }
    }
}

/// Aggregate covariate `x_v` for every vertex, plus whether each set was empty.
pub(crate) fn covariate_and_emptiness<F: Real>(
    g: &Graph,
    values: &[F],
    semantics: SemanticsKind,
    agg: AggKind,
) -> Result<(Vec<F>, Vec<bool>), SynthError> {
    if !semantics.is_set_valued() {
        return Err(SynthError::CountValued(semantics));
    }
    let n = g.vertex_count();
    if values.len() != n {
        return Err(SynthError::LengthMismatch {
            expected: n,
            got: values.len(),
        });
    }
    Ok((0..n)
        .into_par_iter()
        .map_init(
            || NeighborhoodScratch::new(n),
            |scratch, i| {
                let set = scratch
                    .neighborhood(g, VertexId::new(i), FOF_DEPTH, semantics)
                    .expect("depth 2 is supported by every set semantics");
                (aggregate(values, &set, agg), set.is_empty())
            },
        )
        .unzip())
}

/// `x_v + epsilon * z_v` with the per-vertex noise streams of `seed`.
pub fn add_noise<F: Real>(covariate: &[F], epsilon: F, seed: u64) -> Vec<F> {
    covariate
        .par_iter()
        .enumerate()
        .map(|(v, &x)| x + epsilon * vertex_noise::<F>(seed, v))
        .collect()
}

/// `O_v = agg(T over the semantics set of v) + epsilon * z_v`.
pub fn gen_outcome<F: Real>(
    g: &Graph,
    treatment: &[F],
    semantics: SemanticsKind,
    agg: AggKind,
    epsilon: F,
    seed: u64,
) -> Result<Vec<F>, SynthError> {
    let (x, _) = covariate_and_emptiness(g, treatment, semantics, agg)?;
    Ok(add_noise(&x, epsilon, seed))
}

/// Treatment and outcome for one trial. Treatment and noise use separate
/// streams derived from `seed`.
pub fn synthesize<F: Real>(
    g: &Graph,
    semantics: SemanticsKind,
    agg: AggKind,
    epsilon: F,
    seed: u64,
) -> Result<AttributeTable<F>, SynthError> {
    let t = gen_treatment::<F>(g, rng::mix(seed, 0));
    let outcome = gen_outcome(g, &t.values, semantics, agg, epsilon, rng::mix(seed, 1))?;
    Ok(AttributeTable {
        treatment: t.values,
        outcome,
        params: GenParams {
            mu: t.mu,
            sigma: t.sigma,
            epsilon,
            agg,
            semantics,
            seed,
        },
    })
}

impl<F: Real> AttributeTable<F> {
    pub fn len(&self) -> usize {
        self.treatment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.treatment.is_empty()
    }

    /// CSV `vertex,T,O` preceded by a `#` comment holding the generation parameters.
    ///
    /// `labels` maps dense ids to external labels for the vertex column.
    pub fn write_csv<W: Write>(&self, mut out: W, labels: Option<&[u64]>) -> io::Result<()> {
        let p = &self.params;
        writeln!(
            out,
            "# mu={} sigma={} epsilon={} agg={} semantics={} seed={}",
            p.mu, p.sigma, p.epsilon, p.agg, p.semantics, p.seed
        )?;
        writeln!(out, "vertex,T,O")?;
        for (v, (t, o)) in self.treatment.iter().zip(&self.outcome).enumerate() {
            let label = labels.map_or(v as u64, |l| l[v]);
            writeln!(out, "{label},{t},{o}")?;
        }
        out.flush()
    }

    /// Reads what [`AttributeTable::write_csv`] wrote, in dense vertex order.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, SynthError> {
        let mut params = None;
        let mut treatment = Vec::new();
        let mut outcome = Vec::new();
        let mut header_seen = false;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            let err = |message: String| SynthError::Csv {
                line: line_no,
                message,
            };
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                params = Some(parse_params(comment).map_err(err)?);
                continue;
            }
            if !header_seen {
                if trimmed != "vertex,T,O" {
                    return Err(err(format!("expected header vertex,T,O, found {trimmed:?}")));
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            }
            let num = |s: &str| s.parse::<F>().map_err(|_| err(format!("bad number {s:?}")));
            treatment.push(num(fields[1])?);
            outcome.push(num(fields[2])?);
        }
        let params = params.ok_or(SynthError::Csv {
            line: 1,
            message: "missing parameter comment".into(),
        })?;
        Ok(AttributeTable {
            treatment,
            outcome,
            params,
        })
    }
}

fn parse_params<F: Real>(comment: &str) -> Result<GenParams<F>, String> {
    let mut p = GenParams {
        mu: F::zero(),
        sigma: F::zero(),
        epsilon: F::zero(),
        agg: AggKind::Mean,
        semantics: SemanticsKind::ShortestExactlyK,
        seed: 0,
    };
    for pair in comment.split_whitespace() {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("malformed parameter {pair:?}"))?;
        let real = |v: &str| v.parse::<F>().map_err(|_| format!("bad value for {key}: {v:?}"));
        match key {
            "mu" => p.mu = real(value)?,
            "sigma" => p.sigma = real(value)?,
            "epsilon" => p.epsilon = real(value)?,
            "agg" => p.agg = value.parse()?,
            "semantics" => p.semantics = value.parse()?,
            "seed" => p.seed = value.parse().map_err(|_| format!("bad seed {value:?}"))?,
            other => return Err(format!("unknown parameter {other:?}")),
        }
    }
    Ok(p)
}
