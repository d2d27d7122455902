//! Jaccard statistics on the SNAP networks, next to the published values.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use super::config::ExperimentConfig;
use super::{csv_writer, HarnessError};
use crate::dataset::{self, DatasetInfo};
use crate::graph::load_edge_list_path;
use crate::neighborhoods::SemanticsKind;
use crate::setstats::{jaccard_graph, JaccardSummary};

pub const SNAP_COLUMNS: [&str; 16] = [
    "dataset",
    "nodes",
    "edges",
    "graph_edges",
    "self_loops",
    "mean_jaccard",
    "max_jaccard",
    "mean_jaccard_nonempty",
    "n_both_empty",
    "table_nodes",
    "table_edges",
    "table_mean_jaccard",
    "table_max_jaccard",
    "wall_time_ms",
    "path",
    "error",
];

/// Per-dataset outcome of a table run.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapRow {
    pub info: &'static DatasetInfo,
    pub path: Option<PathBuf>,
    pub nodes: usize,
    /// Edge count as SNAP reports it: distinct edges plus self-loop vertices.
    pub edges: usize,
    pub graph_edges: usize,
    pub self_loops: usize,
    pub summary: Option<JaccardSummary<f64>>,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SnapReport {
    pub rows: Vec<SnapRow>,
}

impl SnapReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

fn selection(config: &ExperimentConfig) -> Result<Vec<&'static DatasetInfo>, HarnessError> {
    if config.datasets.is_empty() {
        return Ok(dataset::default_selection(config.include_large));
    }
    config
        .datasets
        .iter()
        .map(|name| {
            dataset::lookup(name).ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown dataset {name:?}; valid names: {}",
                    dataset::names().join(", ")
                ))
            })
        })
        .collect()
}

fn measure(config: &ExperimentConfig, info: &'static DatasetInfo) -> SnapRow {
    let start = Instant::now();
    let mut row = SnapRow {
        info,
        path: None,
        nodes: 0,
        edges: 0,
        graph_edges: 0,
        self_loops: 0,
        summary: None,
        wall_time_ms: 0.0,
        error: None,
    };
    let result = (|| -> Result<(), String> {
        #[cfg(feature = "fetch")]
        if config.fetch && info.locate(&config.data_dir).is_none() {
            crate::fetch::fetch_dataset(info.name, &config.data_dir).map_err(|e| e.to_string())?;
        }
        let path = info.locate(&config.data_dir).ok_or_else(|| {
            format!(
                "{} not found in {} (expected {})",
                info.name,
                config.data_dir.display(),
                info.file_name()
            )
        })?;
        row.path = Some(path.clone());
        let loaded = load_edge_list_path(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        row.nodes = loaded.graph.vertex_count();
        row.edges = loaded.snap_edge_count();
        row.graph_edges = loaded.graph.edge_count();
        row.self_loops = loaded.report.distinct_self_loops;
        let s = jaccard_graph::<f64>(
            &loaded.graph,
            SemanticsKind::ShortestExactlyK,
            SemanticsKind::PathExactlyK,
            config.k,
        )
        .map_err(|e| e.to_string())?;
        row.summary = Some(s);
        Ok(())
    })();
    row.error = result.err();
    row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    row
}

/// Writes one row per selected dataset. Missing or unreadable datasets
/// produce a row with the error filled in rather than aborting the table.
pub fn run_snap_table<W: Write>(config: &ExperimentConfig, out: W) -> Result<SnapReport, HarnessError> {
    let datasets = selection(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let mut w = csv_writer(out);
    w.write_record(SNAP_COLUMNS)?;
    w.flush()?;
    let mut report = SnapReport::default();
    for info in datasets {
        let row = pool.install(|| measure(config, info));
        let blank = String::new;
        let (mean, max, nonempty, both) = match &row.summary {
            Some(s) => (
                s.mean.to_string(),
                s.max.to_string(),
                s.mean_nonempty.to_string(),
                s.n_both_empty.to_string(),
            ),
            None => (blank(), blank(), blank(), blank()),
        };
        let loaded = row.error.is_none() || row.nodes > 0;
        let count = |x: usize| if loaded { x.to_string() } else { blank() };
        w.write_record([
            info.name.to_string(),
            count(row.nodes),
            count(row.edges),
            count(row.graph_edges),
            count(row.self_loops),
            mean,
            max,
            nonempty,
            both,
            info.nodes.to_string(),
            info.edges.to_string(),
            info.mean_jaccard.to_string(),
            info.max_jaccard.to_string(),
            format!("{:.3}", row.wall_time_ms),
            row.path
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            row.error.clone().unwrap_or_default(),
        ])?;
        w.flush()?;
        report.rows.push(row);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_dataset_gives_error_row() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig {
            datasets: vec!["ca-GrQc".into()],
            data_dir: dir.path().to_path_buf(),
            ..ExperimentConfig::default()
        };
        let mut out = Vec::new();
        let report = run_snap_table(&config, &mut out).unwrap();
        assert_eq!(report.failures(), 1);
        let text = String::from_utf8(out).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert!(row.starts_with("ca-GrQc,,,,,,,,,5242,14496,"));
        assert!(row.contains("not found"));
    }

    #[test]
    fn local_file_is_measured() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("Oregon-1.txt"),
            "# toy\n1\t2\n2\t3\n3\t1\n3\t4\n4\t4\n",
        )
        .unwrap();
        let config = ExperimentConfig {
            datasets: vec!["oregon-1".into()],
            data_dir: dir.path().to_path_buf(),
            ..ExperimentConfig::default()
        };
        let report = run_snap_table(&config, std::io::sink()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.error, None);
        assert_eq!(
            (row.nodes, row.graph_edges, row.edges, row.self_loops),
            (4, 4, 5, 1)
        );
        // 0..2 form a triangle, 3 hangs off 2.
        // strict: {3}, {3}, {}, {0,1}; path: {1,2,3}, {0,2,3}, {0,1}, {0,1}.
        let s = row.summary.as_ref().unwrap();
        assert!((s.mean - (2.0 / 3.0 + 2.0 / 3.0 + 1.0 + 0.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_dataset_is_a_config_error() {
        let config = ExperimentConfig {
            datasets: vec!["ca-Nope".into()],
            ..ExperimentConfig::default()
        };
        let err = run_snap_table(&config, std::io::sink()).unwrap_err().to_string();
        assert!(err.contains("ca-GrQc"), "{err}");
    }
}
