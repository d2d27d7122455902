//! Peer-effect regression under a chosen semantics, scored by Gaussian
//! log-likelihood.
//!
//! The model is `O_v = beta0 + beta1 * x_v + e_v`, `e_v ~ N(0, sigma2)`, where
//! `x_v` aggregates treatments over the friends-of-friends of `v`. The
//! coefficients are least squares, `sigma2 = RSS / n` is the MLE, and the
//! maximized log-likelihood is `-n/2 * (ln(2 pi sigma2) + 1)`.

use thiserror::Error;

use crate::graph::Graph;
use crate::neighborhoods::SemanticsKind;
use crate::scalar::Real;
use crate::synth::{covariate_and_emptiness, AggKind, AttributeTable, SynthError};

/// Residual-variance floor applied before taking the log.
pub const VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult<F> {
    pub beta0: F,
    pub beta1: F,
    /// MLE residual variance after flooring.
    pub sigma2: F,
    pub log_likelihood: F,
    pub n_used: usize,
    /// Raw `RSS / n` fell below [`VARIANCE_FLOOR`].
    pub floored: bool,
    pub semantics: Option<SemanticsKind>,
    pub agg: Option<AggKind>,
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("covariate is constant{}; slope is not identifiable", context(.semantics, .agg))]
    DegenerateCovariate {
        semantics: Option<SemanticsKind>,
        agg: Option<AggKind>,
    },
    #[error("need at least 3 observations, got {n}")]
    InsufficientData { n: usize },
    #[error("x has {x} values but y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error(transparent)]
    Synth(#[from] SynthError),
}

fn context(semantics: &Option<SemanticsKind>, agg: &Option<AggKind>) -> String {
    match (semantics, agg) {
        (Some(s), Some(a)) => format!(" for semantics={s}, agg={a}"),
        (Some(s), None) => format!(" for semantics={s}"),
        (None, Some(a)) => format!(" for agg={a}"),
        (None, None) => String::new(),
    }
}

impl FitError {
    fn tagged(self, s: SemanticsKind, a: AggKind) -> Self {
        match self {
            FitError::DegenerateCovariate { .. } => FitError::DegenerateCovariate {
                semantics: Some(s),
                agg: Some(a),
            },
            other => other,
        }
    }
}

/// `x_v = agg(treatment over the semantics set of v)` for every vertex.
pub fn build_covariate<F: Real>(
    g: &Graph,
    treatment: &[F],
    semantics: SemanticsKind,
    agg: AggKind,
) -> Result<Vec<F>, FitError> {
    Ok(covariate_and_emptiness(g, treatment, semantics, agg)?.0)
}

/// Simple linear regression of `y` on `x` with Gaussian log-likelihood.
pub fn ols_fit<F: Real>(x: &[F], y: &[F]) -> Result<FitResult<F>, FitError> {
    if x.len() != y.len() {
        return Err(FitError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(FitError::InsufficientData { n });
    }
    let nf = F::from_count(n);
    let x_mean = x.iter().copied().sum::<F>() / nf;
    let y_mean = y.iter().copied().sum::<F>() / nf;
    let (mut sxx, mut sxy) = (F::zero(), F::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - x_mean;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * (yi - y_mean);
    }
    if sxx == F::zero() {
        return Err(FitError::DegenerateCovariate {
            semantics: None,
            agg: None,
        });
    }
    let beta1 = sxy / sxx;
    let beta0 = y_mean - beta1 * x_mean;
    let rss: F = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - beta0 - beta1 * xi;
            r * r
        })
        .sum();
    let raw = rss / nf;
    let floor = F::lit(VARIANCE_FLOOR);
    let floored = raw < floor;
    let sigma2 = if floored { floor } else { raw };
    Ok(FitResult {
        beta0,
        beta1,
        sigma2,
        log_likelihood: gaussian_log_likelihood(n, sigma2),
        n_used: n,
        floored,
        semantics: None,
        agg: None,
    })
}

/// Maximized Gaussian log-likelihood at MLE variance `sigma2`.
pub fn gaussian_log_likelihood<F: Real>(n: usize, sigma2: F) -> F {
    let two_pi = F::lit(std::f64::consts::TAU);
    -F::from_count(n) / F::lit(2.0) * ((two_pi * sigma2).ln() + F::one())
}

/// Options for [`compare_semantics_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct FitOptions {
    /// Drop vertices whose set is empty under either semantics.
    pub drop_empty: bool,
}

/// Both semantics fitted on the same vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct SemanticsComparison<F> {
    pub strict: FitResult<F>,
    pub path: FitResult<F>,
    /// Covariates were identical, so the fits are too.
    pub tie: bool,
}

impl<F: Real> SemanticsComparison<F> {
    pub fn fit(&self, semantics: SemanticsKind) -> Option<&FitResult<F>> {
        match semantics {
            SemanticsKind::ShortestExactlyK => Some(&self.strict),
            SemanticsKind::PathExactlyK => Some(&self.path),
            SemanticsKind::PathCountK => None,
        }
    }

    /// Semantics with the strictly higher log-likelihood; `None` on a tie.
    pub fn winner(&self) -> Option<SemanticsKind> {
        if self.tie || self.strict.log_likelihood == self.path.log_likelihood {
            None
        } else if self.strict.log_likelihood > self.path.log_likelihood {
            Some(SemanticsKind::ShortestExactlyK)
        } else {
            Some(SemanticsKind::PathExactlyK)
        }
    }
}

/// Fits the strictly-2 and 2-and-1 models to `table.outcome`.
pub fn compare_semantics<F: Real>(
    g: &Graph,
    table: &AttributeTable<F>,
    agg: AggKind,
) -> Result<SemanticsComparison<F>, FitError> {
    compare_semantics_with(g, table, agg, FitOptions::default())
}

pub fn compare_semantics_with<F: Real>(
    g: &Graph,
    table: &AttributeTable<F>,
    agg: AggKind,
    options: FitOptions,
) -> Result<SemanticsComparison<F>, FitError> {
    let strict = covariate_and_emptiness(g, &table.treatment, SemanticsKind::ShortestExactlyK, agg)?;
    let path = covariate_and_emptiness(g, &table.treatment, SemanticsKind::PathExactlyK, agg)?;
    let keep: Option<Vec<bool>> = options
        .drop_empty
        .then(|| strict.1.iter().zip(&path.1).map(|(&a, &b)| !(a || b)).collect());
    compare_covariates(&strict.0, &path.0, &table.outcome, agg, keep.as_deref())
}

/// Fits `y` against two precomputed covariates, optionally on a vertex subset.
pub fn compare_covariates<F: Real>(
    strict_x: &[F],
    path_x: &[F],
    y: &[F],
    agg: AggKind,
    keep: Option<&[bool]>,
) -> Result<SemanticsComparison<F>, FitError> {
    let select = |v: &[F]| -> Vec<F> {
        match keep {
            Some(mask) => v.iter().zip(mask).filter(|(_, &k)| k).map(|(&x, _)| x).collect(),
            None => v.to_vec(),
        }
    };
    let (xs, xp, y) = (select(strict_x), select(path_x), select(y));
    let fit = |x: &[F], s: SemanticsKind| -> Result<FitResult<F>, FitError> {
        let mut r = ols_fit(x, &y).map_err(|e| e.tagged(s, agg))?;
        r.semantics = Some(s);
        r.agg = Some(agg);
        Ok(r)
    };
    let strict = fit(&xs, SemanticsKind::ShortestExactlyK)?;
    let path = fit(&xp, SemanticsKind::PathExactlyK)?;
    Ok(SemanticsComparison {
        strict,
        path,
        tie: xs == xp,
    })
}
