//! Batch experiments: grid sweeps over generator parameters, the SNAP
//! table, and pivoting sweep output for plotting.
//!
//! Every trial's randomness is a pure function of
//! `(base_seed, grid_index, trial_index)`, so output is byte-identical for
//! any worker count and a sweep can be split by grid range and concatenated.

mod config;
mod plot;
mod snap;
mod sweep;

use std::io;

use thiserror::Error;

pub use config::{ExperimentConfig, ExperimentKind, Grid, GridPlan, GridPoint};
pub use plot::pivot_for_plot;
pub use snap::{run_snap_table, SnapReport, SNAP_COLUMNS};
pub use sweep::{
    jaccard_columns, model_columns, resume_sweep, run_jaccard_sweep, run_model_sweep, run_sweep, SweepReport,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("resume: {0}")]
    Resume(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Generator(#[from] crate::generators::GeneratorError),
    #[error(transparent)]
    SetStats(#[from] crate::setstats::SetStatsError),
}

/// Runs `f` on a pool of `workers` threads (0: rayon's default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn csv_writer<W: io::Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}
