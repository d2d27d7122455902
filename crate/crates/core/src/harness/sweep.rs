//! Grid sweeps: Jaccard distance between semantics, and model selection on
//! synthetic attributes.
//!
//! Rows for a grid point are its trial rows in trial order followed by its
//! mean rows. A grid point is written and flushed only once all its trials
//! finish, so an interrupted file holds complete points plus at most one
//! partial point, which [`resume_sweep`] discards.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::ops::Range;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, GridPlan, GridPoint};
use super::{csv_writer, HarnessError};
use crate::generators::{GeneratorSpec, GraphModel};
use crate::modelfit::{compare_covariates, SemanticsComparison};
use crate::neighborhoods::SemanticsKind;
use crate::rng::{derive, trial_seed};
use crate::setstats::{jaccard_graph, JaccardSummary};
use crate::synth::{add_noise, covariate_and_emptiness, gen_treatment, AggKind};

const STRICT: SemanticsKind = SemanticsKind::ShortestExactlyK;
const PATH: SemanticsKind = SemanticsKind::PathExactlyK;
const FITTED: [SemanticsKind; 2] = [STRICT, PATH];

const MODEL_PREFIX: [&str; 10] = [
    "row",
    "grid_index",
    "family",
    "n",
    "p",
    "power",
    "m",
    "nei",
    "trial",
    "seed",
];

pub fn jaccard_columns(wall_time: bool) -> Vec<&'static str> {
    let mut c = MODEL_PREFIX.to_vec();
    c.extend([
        "kind_a",
        "kind_b",
        "k",
        "mean",
        "max",
        "mean_nonempty",
        "n_both_empty",
    ]);
    if wall_time {
        c.push("wall_time_ms");
    }
    c
}

pub fn model_columns(wall_time: bool) -> Vec<&'static str> {
    let mut c = MODEL_PREFIX.to_vec();
    c.extend([
        "generating",
        "fitted",
        "agg",
        "epsilon",
        "beta0",
        "beta1",
        "sigma2",
        "log_likelihood",
        "n_used",
        "floored",
        "tie",
        "win",
        "ok_trials",
        "error",
    ]);
    if wall_time {
        c.push("wall_time_ms");
    }
    c
}

/// What a sweep run covered.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepReport {
    /// Grid indices written by this run.
    pub grid: Range<usize>,
    pub grid_total: usize,
    pub skipped_infeasible: Vec<(usize, usize)>,
    /// Rewiring attempts that exhausted their retries, over all trials.
    pub rewires_skipped: usize,
    /// Trials whose fit failed, counted once per fit.
    pub failed_fits: usize,
    pub rows: usize,
}

pub fn run_jaccard_sweep<W: Write>(config: &ExperimentConfig, out: W) -> Result<SweepReport, HarnessError> {
    run_sweep(config, ExperimentKind::JaccardSweep, out)
}

pub fn run_model_sweep<W: Write>(config: &ExperimentConfig, out: W) -> Result<SweepReport, HarnessError> {
    run_sweep(config, ExperimentKind::ModelSweep, out)
}

/// Runs the grid range selected by the config, header included.
pub fn run_sweep<W: Write>(
    config: &ExperimentConfig,
    kind: ExperimentKind,
    out: W,
) -> Result<SweepReport, HarnessError> {
    let plan = plan_for(config, kind)?;
    let range = config.selected_range(plan.points.len());
    drive(config, kind, &plan, range, out, true)
}

/// Keeps the complete grid points already in `path` and appends the rest.
pub fn resume_sweep(
    config: &ExperimentConfig,
    kind: ExperimentKind,
    path: &Path,
) -> Result<SweepReport, HarnessError> {
    let plan = plan_for(config, kind)?;
    let range = config.selected_range(plan.points.len());
    let existing = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(e.into()),
    };
    let header = columns(config, kind).join(",");
    let (keep, next) = completed_prefix(&existing, &header, mean_rows_per_point(config, kind)?)?;
    let start = next.map_or(range.start, |n| n.max(range.start)).min(range.end);
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .truncate(false)
        .open(path)?;
    file.set_len(keep as u64)?;
    drop(file);
    let out = OpenOptions::new().append(true).open(path)?;
    drive(
        config,
        kind,
        &plan,
        start..range.end,
        io::BufWriter::new(out),
        keep == 0,
    )
}

fn plan_for(config: &ExperimentConfig, kind: ExperimentKind) -> Result<GridPlan, HarnessError> {
    match kind {
        ExperimentKind::JaccardSweep | ExperimentKind::ModelSweep => config.plan(kind),
        ExperimentKind::SnapTable => Err(HarnessError::Config("snap-table is not a grid sweep".into())),
    }
}

fn columns(config: &ExperimentConfig, kind: ExperimentKind) -> Vec<&'static str> {
    match kind {
        ExperimentKind::ModelSweep => model_columns(config.wall_time),
        _ => jaccard_columns(config.wall_time),
    }
}

fn mean_rows_per_point(config: &ExperimentConfig, kind: ExperimentKind) -> Result<usize, HarnessError> {
    Ok(match kind {
        ExperimentKind::ModelSweep => {
            config.generating.len() * config.agg.len() * config.epsilons()?.len() * FITTED.len()
        }
        _ => 1,
    })
}

/// Byte length of the complete prefix and the grid index after its last point.
fn completed_prefix(
    text: &str,
    header: &str,
    expected: usize,
) -> Result<(usize, Option<usize>), HarnessError> {
    if text.is_empty() {
        return Ok((0, None));
    }
    let mut lines = text.split_inclusive('\n');
    let first = lines.next().unwrap_or_default();
    if !first.ends_with('\n') {
        return Ok((0, None));
    }
    if first.trim_end() != header {
        return Err(HarnessError::Resume(format!(
            "existing header {:?} does not match this configuration ({header:?})",
            first.trim_end()
        )));
    }
    let mut offset = first.len();
    let mut keep = offset;
    let mut next = None;
    let mut current: Option<(usize, usize)> = None;
    for line in lines {
        if !line.ends_with('\n') {
            break;
        }
        offset += line.len();
        let mut fields = line.splitn(3, ',');
        let (kind, grid) = (
            fields.next().unwrap_or_default(),
            fields.next().unwrap_or_default(),
        );
        if kind != "mean" {
            continue;
        }
        let g: usize = grid
            .parse()
            .map_err(|_| HarnessError::Resume(format!("bad grid_index {grid:?}")))?;
        let seen = match current {
            Some((cg, c)) if cg == g => c + 1,
            _ => 1,
        };
        current = Some((g, seen));
        if seen == expected {
            keep = offset;
            next = Some(g + 1);
        }
    }
    Ok((keep, next))
}

struct PointRows {
    rows: Vec<Vec<String>>,
    rewires_skipped: usize,
    failed_fits: usize,
}

fn drive<W: Write>(
    config: &ExperimentConfig,
    kind: ExperimentKind,
    plan: &GridPlan,
    range: Range<usize>,
    out: W,
    header: bool,
) -> Result<SweepReport, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let mut w = csv_writer(out);
    if header {
        w.write_record(columns(config, kind))?;
        w.flush()?;
    }
    let mut report = SweepReport {
        grid: range.clone(),
        grid_total: plan.points.len(),
        skipped_infeasible: plan.skipped_infeasible.clone(),
        ..SweepReport::default()
    };
    let epsilons = config.epsilons()?;
    for point in &plan.points[range] {
        let start = Instant::now();
        let mut rows = pool.install(|| match kind {
            ExperimentKind::ModelSweep => model_point(config, point, &epsilons),
            _ => jaccard_point(config, point),
        })?;
        if config.wall_time {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            for r in rows.rows.iter_mut().filter(|r| r[0] == "mean") {
                r.push(format!("{ms:.3}"));
            }
        }
        for r in &rows.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        report.rows += rows.rows.len();
        report.rewires_skipped += rows.rewires_skipped;
        report.failed_fits += rows.failed_fits;
    }
    Ok(report)
}

fn prefix(row: &str, point: &GridPoint, trial: Option<(usize, u64)>) -> Vec<String> {
    let blank = String::new;
    let (p, power, m, nei) = match point.model {
        GraphModel::ErdosRenyi { p, .. } => (p.to_string(), blank(), blank(), blank()),
        GraphModel::BarabasiAlbert { power, m, .. } => (blank(), power.to_string(), m.to_string(), blank()),
        GraphModel::WattsStrogatz { nei, p, .. } => (p.to_string(), blank(), blank(), nei.to_string()),
    };
    let (t, seed) = trial.map_or((blank(), blank()), |(t, s)| (t.to_string(), s.to_string()));
    vec![
        row.to_string(),
        point.index.to_string(),
        point.model.family().short_name().to_string(),
        point.model.n().to_string(),
        p,
        power,
        m,
        nei,
        t,
        seed,
    ]
}

fn elapsed_ms(start: Instant) -> String {
    format!("{:.3}", start.elapsed().as_secs_f64() * 1e3)
}

fn jaccard_point(config: &ExperimentConfig, point: &GridPoint) -> Result<PointRows, HarnessError> {
    let trials: Vec<(u64, JaccardSummary<f64>, usize, String)> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let start = Instant::now();
            let seed = trial_seed(config.base_seed, point.index as u64, t as u64);
            let (g, rep) = GeneratorSpec::new(point.model, derive(seed, &[0])).generate()?;
            let s = jaccard_graph::<f64>(&g, STRICT, PATH, config.k)?;
            Ok((seed, s, rep.rewires_skipped, elapsed_ms(start)))
        })
        .collect::<Result<_, HarnessError>>()?;

    let stats = |s: &JaccardSummary<f64>| {
        vec![
            STRICT.to_string(),
            PATH.to_string(),
            config.k.to_string(),
            s.mean.to_string(),
            s.max.to_string(),
            s.mean_nonempty.to_string(),
        ]
    };
    let mut rows = Vec::with_capacity(trials.len() + 1);
    let count = trials.len() as f64;
    let mut mean = JaccardSummary {
        mean: 0.0,
        max: 0.0,
        mean_nonempty: 0.0,
        n_both_empty: 0,
        vertex_count: point.model.n(),
        per_node: None,
    };
    let mut both_empty = 0.0;
    let mut rewires_skipped = 0;
    for (t, (seed, s, skipped, ms)) in trials.iter().enumerate() {
        let mut r = prefix("trial", point, Some((t, *seed)));
        r.extend(stats(s));
        r.push(s.n_both_empty.to_string());
        if config.wall_time {
            r.push(ms.clone());
        }
        rows.push(r);
        mean.mean += s.mean;
        mean.mean_nonempty += s.mean_nonempty;
        mean.max = mean.max.max(s.max);
        both_empty += s.n_both_empty as f64;
        rewires_skipped += skipped;
    }
    mean.mean /= count;
    mean.mean_nonempty /= count;
    let mut r = prefix("mean", point, None);
    r.extend(stats(&mean));
    r.push((both_empty / count).to_string());
    rows.push(r);
    Ok(PointRows {
        rows,
        rewires_skipped,
        failed_fits: 0,
    })
}

struct ModelTrial {
    seed: u64,
    /// Indexed by `(generating, agg, epsilon)` in config order.
    fits: Vec<Result<SemanticsComparison<f64>, String>>,
    rewires_skipped: usize,
    ms: String,
}

fn model_trial(
    config: &ExperimentConfig,
    point: &GridPoint,
    epsilons: &[f64],
    t: usize,
) -> Result<ModelTrial, HarnessError> {
    let start = Instant::now();
    let seed = trial_seed(config.base_seed, point.index as u64, t as u64);
    let (g, rep) = GeneratorSpec::new(point.model, derive(seed, &[0])).generate()?;
    let treatment = gen_treatment::<f64>(&g, derive(seed, &[1]));
    let covariates: Vec<_> = config
        .agg
        .iter()
        .map(|&agg| {
            let (xs, es) = covariate_and_emptiness(&g, &treatment.values, STRICT, agg).expect("set-valued");
            let (xp, ep) = covariate_and_emptiness(&g, &treatment.values, PATH, agg).expect("set-valued");
            let keep: Option<Vec<bool>> = config
                .drop_empty
                .then(|| es.iter().zip(&ep).map(|(&a, &b)| !(a || b)).collect());
            (xs, xp, keep)
        })
        .collect();
    let mut fits = Vec::with_capacity(config.generating.len() * config.agg.len() * epsilons.len());
    for (gi, &generating) in config.generating.iter().enumerate() {
        for (ai, (&agg, (xs, xp, keep))) in config.agg.iter().zip(&covariates).enumerate() {
            let x = if generating == STRICT { xs } else { xp };
            let noise_seed = derive(seed, &[2, gi as u64, ai as u64]);
            for &eps in epsilons {
                let y = add_noise(x, eps, noise_seed);
                fits.push(compare_covariates(xs, xp, &y, agg, keep.as_deref()).map_err(|e| e.to_string()));
            }
        }
    }
    Ok(ModelTrial {
        seed,
        fits,
        rewires_skipped: rep.rewires_skipped,
        ms: elapsed_ms(start),
    })
}

#[derive(Default)]
struct FitMean {
    beta0: f64,
    beta1: f64,
    sigma2: f64,
    log_likelihood: f64,
    n_used: f64,
    floored: usize,
    tie: usize,
    wins: usize,
    ok: usize,
    failed: usize,
}

fn model_point(
    config: &ExperimentConfig,
    point: &GridPoint,
    epsilons: &[f64],
) -> Result<PointRows, HarnessError> {
    let trials: Vec<ModelTrial> = (0..config.trials)
        .into_par_iter()
        .map(|t| model_trial(config, point, epsilons, t))
        .collect::<Result<_, HarnessError>>()?;

    let combos: Vec<(SemanticsKind, AggKind, f64)> = config
        .generating
        .iter()
        .flat_map(|&g| {
            config
                .agg
                .iter()
                .flat_map(move |&a| epsilons.iter().map(move |&e| (g, a, e)))
        })
        .collect();
    let labels = |r: &mut Vec<String>,
                  (generating, agg, eps): (SemanticsKind, AggKind, f64),
                  fitted: SemanticsKind| {
        r.extend([
            generating.to_string(),
            fitted.to_string(),
            agg.to_string(),
            eps.to_string(),
        ]);
    };
    let flag = |b: bool| if b { "1" } else { "0" }.to_string();

    let mut rows = Vec::new();
    let mut means: Vec<FitMean> = (0..combos.len() * FITTED.len())
        .map(|_| FitMean::default())
        .collect();
    let mut rewires_skipped = 0;
    let mut failed_fits = 0;
    for (t, trial) in trials.iter().enumerate() {
        rewires_skipped += trial.rewires_skipped;
        for (ci, (&combo, fit)) in combos.iter().zip(&trial.fits).enumerate() {
            for (fi, &fitted) in FITTED.iter().enumerate() {
                let acc = &mut means[ci * FITTED.len() + fi];
                let mut r = prefix("trial", point, Some((t, trial.seed)));
                labels(&mut r, combo, fitted);
                match fit {
                    Ok(cmp) => {
                        let f = cmp.fit(fitted).expect("fitted semantics is set-valued");
                        let win = cmp.winner().map(|w| w == fitted);
                        r.extend([
                            f.beta0.to_string(),
                            f.beta1.to_string(),
                            f.sigma2.to_string(),
                            f.log_likelihood.to_string(),
                            f.n_used.to_string(),
                            flag(f.floored),
                            flag(cmp.tie),
                            win.map(flag).unwrap_or_default(),
                            "1".into(),
                            String::new(),
                        ]);
                        acc.beta0 += f.beta0;
                        acc.beta1 += f.beta1;
                        acc.sigma2 += f.sigma2;
                        acc.log_likelihood += f.log_likelihood;
                        acc.n_used += f.n_used as f64;
                        acc.floored += f.floored as usize;
                        acc.tie += cmp.tie as usize;
                        acc.wins += (win == Some(true)) as usize;
                        acc.ok += 1;
                    }
                    Err(message) => {
                        r.extend(std::iter::repeat_n(String::new(), 7));
                        r.extend([String::new(), "0".into(), message.clone()]);
                        acc.failed += 1;
                        if fi == 0 {
                            failed_fits += 1;
                        }
                    }
                }
                if config.wall_time {
                    r.push(trial.ms.clone());
                }
                rows.push(r);
            }
        }
    }
    for (ci, &combo) in combos.iter().enumerate() {
        for (fi, &fitted) in FITTED.iter().enumerate() {
            let m = &means[ci * FITTED.len() + fi];
            let mut r = prefix("mean", point, None);
            labels(&mut r, combo, fitted);
            let avg = |x: f64| {
                if m.ok == 0 {
                    String::new()
                } else {
                    (x / m.ok as f64).to_string()
                }
            };
            r.extend([
                avg(m.beta0),
                avg(m.beta1),
                avg(m.sigma2),
                avg(m.log_likelihood),
                avg(m.n_used),
                m.floored.to_string(),
                m.tie.to_string(),
                avg(m.wins as f64),
                m.ok.to_string(),
                if m.failed == 0 {
                    String::new()
                } else {
                    format!("{} of {} trials failed", m.failed, trials.len())
                },
            ]);
            rows.push(r);
        }
    }
    Ok(PointRows {
        rows,
        rewires_skipped,
        failed_fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Family;
    use crate::harness::Grid;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            families: Some(vec![Family::ErdosRenyi, Family::WattsStrogatz]),
            sizes: vec![12],
            er_p: Grid::Many(vec![0.3, 0.6]),
            ws_nei: vec![2],
            ws_p: Grid::One(0.2),
            trials: 3,
            ..ExperimentConfig::default()
        }
    }

    fn run(config: &ExperimentConfig, kind: ExperimentKind) -> String {
        let mut out = Vec::new();
        run_sweep(config, kind, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn jaccard_rows_per_point() {
        let text = run(&small(), ExperimentKind::JaccardSweep);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], jaccard_columns(false).join(","));
        // 3 grid points, 3 trials + 1 mean each.
        assert_eq!(lines.len(), 1 + 3 * 4);
        assert!(lines[4].starts_with("mean,0,er,12,0.3,"));
        assert!(lines[12].starts_with("mean,2,ws,12,0.2,,,2,"));
    }

    #[test]
    fn model_rows_per_point() {
        let mut c = small();
        c.epsilon = Grid::Many(vec![0.0, 0.5]);
        let text = run(&c, ExperimentKind::ModelSweep);
        // per point: 3 trials * (2 gen * 2 agg * 2 eps * 2 fitted) + 16 mean rows
        assert_eq!(text.lines().count(), 1 + 3 * (3 * 16 + 16));
        assert_eq!(mean_rows_per_point(&c, ExperimentKind::ModelSweep).unwrap(), 16);
    }

    #[test]
    fn prefix_detection() {
        let header = "row,grid_index,x";
        let text = "row,grid_index,x\ntrial,0,a\nmean,0,b\ntrial,1,c\nmean,1,";
        let (keep, next) = completed_prefix(text, header, 1).unwrap();
        assert_eq!(&text[..keep], "row,grid_index,x\ntrial,0,a\nmean,0,b\n");
        assert_eq!(next, Some(1));
        let (keep, next) = completed_prefix("row,grid_index,x\ntrial,0,a\n", header, 1).unwrap();
        assert_eq!((keep, next), (17, None));
        assert_eq!(completed_prefix("", header, 1).unwrap(), (0, None));
        assert!(completed_prefix("other\n", header, 1).is_err());
        let two = "row,grid_index,x\nmean,0,a\nmean,0,b\nmean,1,a\n";
        let (keep, next) = completed_prefix(two, header, 2).unwrap();
        assert_eq!(
            (&two[..keep], next),
            ("row,grid_index,x\nmean,0,a\nmean,0,b\n", Some(1))
        );
    }

    #[test]
    fn failed_fits_are_reported_in_rows() {
        // An empty graph makes every covariate constant.
        let c = ExperimentConfig {
            families: Some(vec![Family::ErdosRenyi]),
            sizes: vec![6],
            er_p: Grid::One(0.0),
            trials: 2,
            agg: vec![AggKind::Mean],
            generating: vec![STRICT],
            ..ExperimentConfig::default()
        };
        let mut out = Vec::new();
        let report = run_sweep(&c, ExperimentKind::ModelSweep, &mut out).unwrap();
        assert_eq!(report.failed_fits, 2);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("semantics=strict, agg=mean"));
        assert!(text.contains("2 of 2 trials failed"));
    }
}
