//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails.
//!
//! Criteria on the SNAP networks read edge lists from `$FOF_DATA_DIR`
//! (default `data/` at the workspace root) and report SKIP when files are
//! absent; set `FOF_REQUIRE_DATA=1` to turn those skips into failures.
//! `FOF_ACCEPTANCE_SEED` replaces the pinned base seed.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fof_core::dataset::{self, DatasetInfo, DATASETS};
use fof_core::generators::{Family, GeneratorSpec, GraphModel};
use fof_core::graph::load_edge_list_path;
use fof_core::harness::{run_sweep, with_workers, ExperimentConfig, ExperimentKind, Grid};
use fof_core::modelfit::{build_covariate, compare_covariates, ols_fit, VARIANCE_FLOOR};
use fof_core::neighborhoods::oracle::oracle_neighbors;
use fof_core::neighborhoods::path_count_k;
use fof_core::rng::{derive, trial_seed};
use fof_core::setstats::jaccard_graph;
use fof_core::synth::{add_noise, gen_treatment};
use fof_core::{AggKind, JaccardSummaryF64, NeighborhoodError, NeighborhoodScratch, SemanticsKind};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

const STRICT: SemanticsKind = SemanticsKind::ShortestExactlyK;
const PATH: SemanticsKind = SemanticsKind::PathExactlyK;

// Criterion 1.
const FB_MEAN_TOL: f64 = 0.010;
const FB_MAX_TOL: f64 = 0.005;
const GRQC_MEAN_TOL: f64 = 0.010;
const OREGON_MEAN_TOL: f64 = 0.002;
const SNAP_TIME_LIMIT: Duration = Duration::from_secs(60);
// Criterion 4.
const ER_LIMIT_TOL: f64 = 0.02;
// Criterion 5.
const WS_NEI1_CEILING: f64 = 0.05;
// Criterion 6.
const ORACLE_GRAPHS: usize = 1000;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(10);
// Criterion 7.
const MODEL_TRIALS: usize = 200;
const MATCHED_WIN_RATE: f64 = 0.70;
// Criterion 8.
const FIT_INSTANCES: usize = 1000;
const FIT_REL_TOL: f64 = 1e-9;
// Criterion 10.
const ROAD_MEAN_TOL: f64 = 0.005;
const ROAD_TIME_LIMIT: Duration = Duration::from_secs(300);

const SWEEP_TRIALS: usize = 50;
const DEFAULT_SEED: u64 = 20_240_611;

enum Status {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn pass(detail: String) -> Outcome {
    Outcome {
        status: Status::Pass,
        detail,
    }
}

fn fail(detail: String) -> Outcome {
    Outcome {
        status: Status::Fail,
        detail,
    }
}

fn judge(ok: bool, detail: String) -> Outcome {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn skip(detail: String) -> Outcome {
    if std::env::var("FOF_REQUIRE_DATA").is_ok_and(|v| v == "1") {
        fail(detail)
    } else {
        Outcome {
            status: Status::Skip,
            detail,
        }
    }
}

/// `$FOF_ACCEPTANCE_SEED` or the pinned default.
fn seed() -> u64 {
    std::env::var("FOF_ACCEPTANCE_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

fn data_dir() -> PathBuf {
    std::env::var_os("FOF_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn dataset(name: &str) -> &'static DatasetInfo {
    dataset::lookup(name).expect("catalog entry")
}

/// Mean rows of a sweep as `(model, mean)` in grid order.
fn sweep_means(config: &ExperimentConfig, plan_kind: ExperimentKind) -> Vec<(GraphModel, f64)> {
    let plan = config.plan(plan_kind).unwrap();
    let mut out = Vec::new();
    run_sweep(config, plan_kind, &mut out).unwrap();
    let mut reader = csv::Reader::from_reader(&out[..]);
    let mean_col = reader
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "mean")
        .unwrap();
    reader
        .records()
        .map(Result::unwrap)
        .filter(|r| &r[0] == "mean")
        .map(|r| {
            let g: usize = r[1].parse().unwrap();
            (plan.points[g].model, r[mean_col].parse().unwrap())
        })
        .collect()
}

fn table_reproduction() -> Outcome {
    let dir = data_dir();
    let wanted = ["ego-Facebook", "ca-GrQc", "Oregon-1"];
    let missing: Vec<&str> = wanted
        .iter()
        .copied()
        .filter(|n| dataset(n).locate(&dir).is_none())
        .collect();
    if !missing.is_empty() {
        return skip(format!("{} not found in {}", missing.join(", "), dir.display()));
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for name in wanted {
        let info = dataset(name);
        let start = Instant::now();
        let g = load_edge_list_path(info.locate(&dir).unwrap()).unwrap().graph;
        let s: JaccardSummaryF64 = with_workers(1, || jaccard_graph(&g, STRICT, PATH, 2))
            .unwrap()
            .unwrap();
        let elapsed = start.elapsed();
        let mean_tol = match name {
            "ego-Facebook" => FB_MEAN_TOL,
            "ca-GrQc" => GRQC_MEAN_TOL,
            _ => OREGON_MEAN_TOL,
        };
        // Either empty-set convention may be the published one.
        let mean_ok = [s.mean, s.mean_nonempty]
            .iter()
            .any(|m| (m - info.mean_jaccard).abs() <= mean_tol);
        let max_ok = match name {
            "ego-Facebook" => (s.max - info.max_jaccard).abs() <= FB_MAX_TOL,
            "ca-GrQc" => s.max == 1.0,
            _ => true,
        };
        let time_ok = elapsed < SNAP_TIME_LIMIT;
        ok &= mean_ok && max_ok && time_ok;
        parts.push(format!(
            "{name} mean={:.4} (nonempty {:.4}, table {}) max={:.4} (table {}) {:.1}s",
            s.mean,
            s.mean_nonempty,
            info.mean_jaccard,
            s.max,
            info.max_jaccard,
            elapsed.as_secs_f64()
        ));
    }
    judge(ok, parts.join("; "))
}

fn loader_counts() -> Outcome {
    let dir = data_dir();
    let present: Vec<&DatasetInfo> = DATASETS.iter().filter(|d| d.locate(&dir).is_some()).collect();
    if present.is_empty() {
        return skip(format!("no dataset files in {}", dir.display()));
    }
    let mut bad = Vec::new();
    for info in &present {
        let loaded = load_edge_list_path(info.locate(&dir).unwrap()).unwrap();
        let (nodes, edges) = (loaded.graph.vertex_count(), loaded.snap_edge_count());
        if (nodes, edges) != (info.nodes, info.edges) {
            bad.push(format!(
                "{} {nodes}/{edges} (without loops {}) vs {}/{}",
                info.name,
                loaded.graph.edge_count(),
                info.nodes,
                info.edges
            ));
        }
    }
    let detail = format!(
        "{} of {} datasets present, {} mismatched{}",
        present.len(),
        DATASETS.len(),
        bad.len(),
        if bad.is_empty() {
            String::new()
        } else {
            format!(": {}", bad.join("; "))
        }
    );
    judge(bad.is_empty(), detail)
}

fn ba_invariance() -> Outcome {
    let config = ExperimentConfig {
        families: Some(vec![Family::BarabasiAlbert]),
        ba_power: Grid::range(0.0, 3.0, 0.5),
        ba_m: vec![1],
        trials: SWEEP_TRIALS,
        base_seed: seed(),
        ..ExperimentConfig::default()
    };
    let mut out = Vec::new();
    run_sweep(&config, ExperimentKind::JaccardSweep, &mut out).unwrap();
    let mut reader = csv::Reader::from_reader(&out[..]);
    let headers = reader.headers().unwrap().clone();
    let col = |n: &str| headers.iter().position(|h| h == n).unwrap();
    let (mean, max) = (col("mean"), col("max"));
    let trials: Vec<csv::StringRecord> = reader
        .records()
        .map(Result::unwrap)
        .filter(|r| &r[0] == "trial")
        .collect();
    let nonzero = trials
        .iter()
        .filter(|r| r[mean].parse::<f64>().unwrap() != 0.0 || r[max].parse::<f64>().unwrap() != 0.0)
        .count();
    let expected = config.sizes.len() * 7 * SWEEP_TRIALS;
    judge(
        nonzero == 0 && trials.len() == expected,
        format!(
            "{} trials over {} sizes x 7 powers, {nonzero} with nonzero distance",
            trials.len(),
            config.sizes.len()
        ),
    )
}

fn er_monotone() -> Outcome {
    let config = ExperimentConfig {
        families: Some(vec![Family::ErdosRenyi]),
        sizes: vec![500],
        trials: SWEEP_TRIALS,
        base_seed: seed(),
        ..ExperimentConfig::default()
    };
    let means = sweep_means(&config, ExperimentKind::JaccardSweep);
    let ps: Vec<f64> = means
        .iter()
        .map(|(m, _)| match m {
            GraphModel::ErdosRenyi { p, .. } => *p,
            _ => unreachable!(),
        })
        .collect();
    let values: Vec<f64> = means.iter().map(|(_, v)| *v).collect();
    let monotone = values.windows(2).all(|w| w[0] <= w[1]);
    let worst = ps
        .iter()
        .zip(&values)
        .map(|(p, v)| (v - p).abs())
        .fold(0.0, f64::max);
    let shown: Vec<String> = ps
        .iter()
        .zip(&values)
        .map(|(p, v)| format!("{p}:{v:.4}"))
        .collect();
    judge(
        monotone && worst <= ER_LIMIT_TOL && values.len() == 9,
        format!("n=500 means {} (max |mean-p| {worst:.4})", shown.join(" ")),
    )
}

fn ws_ordering() -> Outcome {
    let config = ExperimentConfig {
        families: Some(vec![Family::WattsStrogatz]),
        sizes: vec![50, 100, 200, 300, 400, 500],
        trials: SWEEP_TRIALS,
        base_seed: seed(),
        ..ExperimentConfig::default()
    };
    let means = sweep_means(&config, ExperimentKind::JaccardSweep);
    let lookup = |n0: usize, nei0: usize, p0: f64| {
        means
            .iter()
            .find(|(m, _)| matches!(m, GraphModel::WattsStrogatz { n, nei, p } if *n == n0 && *nei == nei0 && *p == p0))
            .map(|(_, v)| *v)
            .unwrap()
    };
    let mut cells = 0;
    let mut violations = Vec::new();
    let mut nei1_max: f64 = 0.0;
    for &n in &config.sizes {
        for p in config.ws_p.values().unwrap() {
            let (a, b, c) = (lookup(n, 1, p), lookup(n, 5, p), lookup(n, 10, p));
            cells += 1;
            nei1_max = nei1_max.max(a);
            if !(a < b && a < c && a < WS_NEI1_CEILING) {
                violations.push(format!("n={n} p={p}: {a:.4} {b:.4} {c:.4}"));
            }
        }
    }
    judge(
        violations.is_empty(),
        format!(
            "{cells} (n, p) cells, nei=1 max mean {nei1_max:.4}{}",
            if violations.is_empty() {
                String::new()
            } else {
                format!("; violations: {}", violations.join("; "))
            }
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(seed());
    let mut checks = 0usize;
    let mut mismatches = Vec::new();
    for i in 0..ORACLE_GRAPHS {
        let g = common::random_graph(&mut rng, 7);
        let mut scratch = NeighborhoodScratch::new(g.vertex_count());
        for v in g.vertices() {
            for k in 1..=3 {
                for kind in [STRICT, PATH] {
                    let fast = scratch.neighborhood(&g, v, k, kind).unwrap();
                    let slow = oracle_neighbors(&g, v, k, kind);
                    checks += 1;
                    if fast.members != slow.members || fast.count != slow.count {
                        mismatches.push(format!("graph {i} v={v} k={k} {kind}"));
                    }
                }
                checks += 1;
                let count = path_count_k(&g, v, k);
                let ok = match (k, count) {
                    (2, Ok(c)) => c == oracle_neighbors(&g, v, k, SemanticsKind::PathCountK).count,
                    (_, Err(NeighborhoodError::UnsupportedK { .. })) => k != 2,
                    _ => false,
                };
                if !ok {
                    mismatches.push(format!("graph {i} v={v} k={k} count"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    judge(
        mismatches.is_empty() && elapsed < ORACLE_TIME_LIMIT,
        format!(
            "{ORACLE_GRAPHS} graphs, {checks} checks, {} mismatches, {:.2}s{}",
            mismatches.len(),
            elapsed.as_secs_f64(),
            mismatches
                .first()
                .map(|m| format!(" (first: {m})"))
                .unwrap_or_default()
        ),
    )
}

fn model_selection() -> Outcome {
    let model = GraphModel::ErdosRenyi { n: 100, p: 0.3 };
    let mut wins = [0usize; 2];
    let mut non_ties = [0usize; 2];
    let mut floored = [0usize; 2];
    let mut failures = 0;
    for t in 0..MODEL_TRIALS {
        let seed = trial_seed(seed(), 0, t as u64);
        let (g, _) = GeneratorSpec::new(model, derive(seed, &[0])).generate().unwrap();
        let treatment = gen_treatment::<f64>(&g, derive(seed, &[1])).values;
        let xs = build_covariate(&g, &treatment, STRICT, AggKind::Mean).unwrap();
        let xp = build_covariate(&g, &treatment, PATH, AggKind::Mean).unwrap();
        for (i, generating) in [STRICT, PATH].into_iter().enumerate() {
            let x = if generating == STRICT { &xs } else { &xp };
            let noise_seed = derive(seed, &[2, i as u64]);
            let noisy = add_noise(x, 0.1, noise_seed);
            match compare_covariates(&xs, &xp, &noisy, AggKind::Mean, None) {
                Ok(cmp) if !cmp.tie => {
                    non_ties[i] += 1;
                    wins[i] += (cmp.winner() == Some(generating)) as usize;
                }
                Ok(_) => {}
                Err(_) => failures += 1,
            }
            let exact = add_noise(x, 0.0, noise_seed);
            match compare_covariates(&xs, &xp, &exact, AggKind::Mean, None) {
                Ok(cmp) => floored[i] += cmp.fit(generating).unwrap().floored as usize,
                Err(_) => failures += 1,
            }
        }
    }
    let rate = |i: usize| wins[i] as f64 / non_ties[i].max(1) as f64;
    let ok = failures == 0
        && (0..2).all(|i| non_ties[i] > 0 && rate(i) >= MATCHED_WIN_RATE && floored[i] == MODEL_TRIALS);
    judge(
        ok,
        format!(
            "ER(100, 0.3) x {MODEL_TRIALS}: matched wins strict {}/{} ({:.1}%), path {}/{} ({:.1}%); eps=0 floored {}/{} and {}/{}",
            wins[0],
            non_ties[0],
            100.0 * rate(0),
            wins[1],
            non_ties[1],
            100.0 * rate(1),
            floored[0],
            MODEL_TRIALS,
            floored[1],
            MODEL_TRIALS
        ),
    )
}

/// Uncentered normal equations solved by Cramer's rule.
fn normal_equations(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    ((sxx * sy - sx * sxy) / det, (n * sxy - sx * sy) / det)
}

fn numerical_fit() -> Outcome {
    let mut rng = common::rng(seed() ^ 0x5eed);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let mut worst = [0.0f64; 4];
    for _ in 0..FIT_INSTANCES {
        let n = rng.random_range(3..=400);
        let (mx, sx) = (rng.random_range(-10.0..10.0), rng.random_range(0.1..10.0));
        let (a, b, c) = (
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(0.01..5.0),
        );
        let x: Vec<f64> = (0..n)
            .map(|_| {
                mx + sx * {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z
                }
            })
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| {
                a + b * v
                    + c * {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z
                    }
            })
            .collect();
        let fit = ols_fit(&x, &y).unwrap();
        let (b0, b1) = normal_equations(&x, &y);
        let resid: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(&xi, &yi)| yi - fit.beta0 - fit.beta1 * xi)
            .collect();
        let dot: f64 = resid.iter().zip(&x).map(|(r, xi)| r * xi).sum();
        let norm: f64 = resid.iter().zip(&x).map(|(r, xi)| (r * xi).abs()).sum();
        let sum: f64 = resid.iter().sum();
        let abs_sum: f64 = resid.iter().map(|r| r.abs()).sum();
        let rss: f64 = x
            .iter()
            .zip(&y)
            .map(|(&xi, &yi)| (yi - b0 - b1 * xi).powi(2))
            .sum();
        let sigma2 = (rss / n as f64).max(VARIANCE_FLOOR);
        let ll = -(n as f64) / 2.0 * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0);
        let errs = [
            rel(fit.beta0, b0).max(rel(fit.beta1, b1)),
            (dot.abs() / norm.max(f64::MIN_POSITIVE)).max(sum.abs() / abs_sum.max(f64::MIN_POSITIVE)),
            (fit.log_likelihood - ll).abs() / ll.abs().max(1.0),
            rel(fit.sigma2, sigma2),
        ];
        for (w, e) in worst.iter_mut().zip(errs) {
            *w = w.max(e);
        }
    }
    judge(
        worst.iter().all(|&w| w <= FIT_REL_TOL),
        format!(
            "{FIT_INSTANCES} instances: max rel err beta {:.1e}, orthogonality {:.1e}, log-likelihood {:.1e}, sigma2 {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn determinism() -> Outcome {
    let base = ExperimentConfig {
        families: Some(vec![
            Family::ErdosRenyi,
            Family::BarabasiAlbert,
            Family::WattsStrogatz,
        ]),
        sizes: vec![30, 120],
        er_p: Grid::Many(vec![0.1, 0.5]),
        ba_power: Grid::Many(vec![0.5, 2.0]),
        ws_nei: vec![1, 5],
        ws_p: Grid::Many(vec![0.1, 0.7]),
        trials: 8,
        base_seed: seed(),
        epsilon: Grid::Many(vec![0.0, 0.1]),
        ..ExperimentConfig::default()
    };
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in [ExperimentKind::JaccardSweep, ExperimentKind::ModelSweep] {
        let outputs: Vec<Vec<u8>> = [1, 4, 16, 1]
            .iter()
            .map(|&w| {
                let config = ExperimentConfig {
                    workers: w,
                    ..base.clone()
                };
                let mut out = Vec::new();
                run_sweep(&config, kind, &mut out).unwrap();
                out
            })
            .collect();
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        ok &= same;
        parts.push(format!(
            "{kind} {} bytes {}",
            outputs[0].len(),
            if same { "identical" } else { "DIFFER" }
        ));
    }
    judge(ok, format!("workers 1/4/16/1: {}", parts.join(", ")))
}

fn road_scale() -> Outcome {
    let dir = data_dir();
    let info = dataset("roadNet-CA");
    let Some(path) = info.locate(&dir) else {
        return skip(format!("roadNet-CA not found in {}", dir.display()));
    };
    let start = Instant::now();
    let g = load_edge_list_path(path).unwrap().graph;
    let s: JaccardSummaryF64 = jaccard_graph(&g, STRICT, PATH, 2).unwrap();
    let elapsed = start.elapsed();
    let mean_ok = [s.mean, s.mean_nonempty]
        .iter()
        .any(|m| (m - info.mean_jaccard).abs() <= ROAD_MEAN_TOL);
    judge(
        mean_ok && elapsed < ROAD_TIME_LIMIT,
        format!(
            "{} vertices, mean={:.4} (nonempty {:.4}, table {}) in {:.1}s",
            g.vertex_count(),
            s.mean,
            s.mean_nonempty,
            info.mean_jaccard,
            elapsed.as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    type Criterion = (u8, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "SNAP table reproduction", table_reproduction),
        (2, "SNAP loader counts", loader_counts),
        (3, "BA invariance", ba_invariance),
        (4, "ER monotonicity and density limit", er_monotone),
        (5, "WS neighborhood ordering", ws_ordering),
        (6, "oracle equivalence", oracle_equivalence),
        (7, "model selection", model_selection),
        (8, "numerical fit checks", numerical_fit),
        (9, "determinism across worker counts", determinism),
        (10, "roadNet-CA scale", road_scale),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Skip => "SKIP",
        };
        println!(
            "[{tag}] criterion {id:>2} {name}: {} [{:.1}s]",
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
