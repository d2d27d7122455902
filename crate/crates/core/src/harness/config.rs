//! Experiment configuration: a flat TOML file plus `key=value` overrides.
//!
//! ```toml
//! # Every key is optional.
//! families = ["er", "ws"]
//! sizes = [10, 50, 100]
//! er_p = { start = 0.1, stop = 0.9, step = 0.1 }
//! ws_p = "0.1:0.9:0.2"        # same range, string form
//! ws_nei = [1, 5, 10]
//! trials = 50
//! base_seed = 7
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer};

use super::HarnessError;
use crate::generators::{Family, GraphModel};
use crate::neighborhoods::SemanticsKind;
use crate::synth::AggKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    JaccardSweep,
    ModelSweep,
    SnapTable,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::JaccardSweep => "jaccard-sweep",
            ExperimentKind::ModelSweep => "model-sweep",
            ExperimentKind::SnapTable => "snap-table",
        })
    }
}

/// A list of reals: explicit values or an inclusive arithmetic range.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Range { start: f64, stop: f64, step: f64 },
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

impl Grid {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Grid::Range { start, stop, step }
    }

    /// Expanded values. Range points are rounded to 12 decimals so that
    /// `0.1 + 2 * 0.1` prints as `0.3`.
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match self {
            Grid::One(x) => Ok(vec![*x]),
            Grid::Many(xs) => Ok(xs.clone()),
            Grid::Range { start, stop, step } => expand_range(*start, *stop, *step),
            Grid::Text(s) => parse_grid_text(s),
        }
    }
}

fn expand_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    if step <= 0.0 || step.is_nan() || !start.is_finite() || !stop.is_finite() {
        return Err(format!("bad range {start}:{stop}:{step}"));
    }
    if stop < start {
        return Err(format!("range stop {stop} below start {start}"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn parse_grid_text(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number {t:?} in grid {s:?}"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => expand_range(num(start)?, num(stop)?, num(step)?),
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("grid {s:?} is neither start:stop:step nor a comma list")),
    }
}

fn one_or_many<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(xs) => xs,
    })
}

fn opt_one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    one_or_many(d).map(Some)
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    /// Defaults to er, ba, ws for Jaccard sweeps and er, ws for model sweeps.
    #[serde(deserialize_with = "opt_one_or_many")]
    pub families: Option<Vec<Family>>,
    #[serde(deserialize_with = "one_or_many")]
    pub sizes: Vec<usize>,
    pub er_p: Grid,
    pub ba_power: Grid,
    #[serde(deserialize_with = "one_or_many")]
    pub ba_m: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub ws_nei: Vec<usize>,
    pub ws_p: Grid,
    pub trials: usize,
    pub base_seed: u64,
    pub k: usize,
    pub epsilon: Grid,
    #[serde(deserialize_with = "one_or_many")]
    pub agg: Vec<AggKind>,
    /// Semantics the model sweep generates outcomes with.
    #[serde(deserialize_with = "one_or_many")]
    pub generating: Vec<SemanticsKind>,
    /// Fit only vertices whose sets are non-empty under both semantics.
    pub drop_empty: bool,
    /// Dataset names for the SNAP table; empty selects the default set.
    #[serde(deserialize_with = "one_or_many")]
    pub datasets: Vec<String>,
    pub data_dir: PathBuf,
    pub include_large: bool,
    /// Download missing datasets before the SNAP table run.
    pub fetch: bool,
    pub out: Option<PathBuf>,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
    /// First grid point to run (inclusive).
    pub grid_start: usize,
    /// Last grid point to run (exclusive).
    pub grid_end: Option<usize>,
    /// Append a wall_time_ms column. Timing columns make output nondeterministic.
    pub wall_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            families: None,
            sizes: vec![10, 50, 100, 200, 300, 400, 500],
            er_p: Grid::range(0.1, 0.9, 0.1),
            ba_power: Grid::range(0.0, 3.0, 0.5),
            ba_m: vec![1],
            ws_nei: vec![1, 5, 10],
            ws_p: Grid::range(0.1, 0.9, 0.2),
            trials: 500,
            base_seed: 42,
            k: 2,
            epsilon: Grid::One(0.1),
            agg: vec![AggKind::Mean, AggKind::Degree],
            generating: vec![SemanticsKind::ShortestExactlyK, SemanticsKind::PathExactlyK],
            drop_empty: false,
            datasets: Vec::new(),
            data_dir: PathBuf::from("data"),
            include_large: false,
            fetch: false,
            out: None,
            workers: 0,
            grid_start: 0,
            grid_end: None,
            wall_time: false,
        }
    }
}

/// One cell of the generator grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub model: GraphModel,
}

/// Expanded grid and what was left out.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridPlan {
    pub points: Vec<GridPoint>,
    /// Watts–Strogatz cells whose lattice cannot be built at that size.
    pub skipped_infeasible: Vec<(usize, usize)>,
}

impl ExperimentConfig {
    /// Parses a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        Self::from_table(table)
    }

    /// Reads `path` (if given), applies `key=value` overrides, and deserializes.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, HarnessError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", p.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            let (key, value) = parse_override(o)?;
            table.insert(key, value);
        }
        Self::from_table(table)
    }

    fn from_table(table: toml::Table) -> Result<Self, HarnessError> {
        ExperimentConfig::deserialize(toml::Value::Table(table))
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Sets one field from `key=value` text.
    pub fn set(&mut self, assignment: &str) -> Result<(), HarnessError> {
        let (key, value) = parse_override(assignment)?;
        let mut table =
            toml::Table::try_from(self.to_table()).map_err(|e| HarnessError::Config(e.to_string()))?;
        table.insert(key, value);
        *self = Self::from_table(table)?;
        Ok(())
    }

    fn to_table(&self) -> toml::Table {
        let mut t = toml::Table::new();
        let mut put = |k: &str, v: toml::Value| {
            t.insert(k.to_string(), v);
        };
        let ints =
            |xs: &[usize]| toml::Value::Array(xs.iter().map(|&x| toml::Value::Integer(x as i64)).collect());
        let strs = |xs: Vec<String>| toml::Value::Array(xs.into_iter().map(toml::Value::String).collect());
        let grid = |g: &Grid| match g {
            Grid::Range { start, stop, step } => {
                let mut r = toml::Table::new();
                r.insert("start".into(), toml::Value::Float(*start));
                r.insert("stop".into(), toml::Value::Float(*stop));
                r.insert("step".into(), toml::Value::Float(*step));
                toml::Value::Table(r)
            }
            Grid::One(x) => toml::Value::Float(*x),
            Grid::Many(xs) => toml::Value::Array(xs.iter().map(|&x| toml::Value::Float(x)).collect()),
            Grid::Text(s) => toml::Value::String(s.clone()),
        };
        if let Some(e) = self.experiment {
            put("experiment", toml::Value::String(e.to_string()));
        }
        if let Some(f) = &self.families {
            put(
                "families",
                strs(f.iter().map(|f| f.short_name().to_string()).collect()),
            );
        }
        put("sizes", ints(&self.sizes));
        put("er_p", grid(&self.er_p));
        put("ba_power", grid(&self.ba_power));
        put("ba_m", ints(&self.ba_m));
        put("ws_nei", ints(&self.ws_nei));
        put("ws_p", grid(&self.ws_p));
        put("trials", toml::Value::Integer(self.trials as i64));
        put("base_seed", toml::Value::Integer(self.base_seed as i64));
        put("k", toml::Value::Integer(self.k as i64));
        put("epsilon", grid(&self.epsilon));
        put("agg", strs(self.agg.iter().map(|a| a.to_string()).collect()));
        put(
            "generating",
            strs(self.generating.iter().map(|s| s.to_string()).collect()),
        );
        put("drop_empty", toml::Value::Boolean(self.drop_empty));
        put("datasets", strs(self.datasets.clone()));
        put(
            "data_dir",
            toml::Value::String(self.data_dir.display().to_string()),
        );
        put("include_large", toml::Value::Boolean(self.include_large));
        put("fetch", toml::Value::Boolean(self.fetch));
        if let Some(o) = &self.out {
            put("out", toml::Value::String(o.display().to_string()));
        }
        put("workers", toml::Value::Integer(self.workers as i64));
        put("grid_start", toml::Value::Integer(self.grid_start as i64));
        if let Some(e) = self.grid_end {
            put("grid_end", toml::Value::Integer(e as i64));
        }
        put("wall_time", toml::Value::Boolean(self.wall_time));
        t
    }

    pub fn families_for(&self, experiment: ExperimentKind) -> Vec<Family> {
        self.families.clone().unwrap_or_else(|| match experiment {
            ExperimentKind::ModelSweep => vec![Family::ErdosRenyi, Family::WattsStrogatz],
            _ => vec![Family::ErdosRenyi, Family::BarabasiAlbert, Family::WattsStrogatz],
        })
    }

    pub fn epsilons(&self) -> Result<Vec<f64>, HarnessError> {
        let eps = self.epsilon.values().map_err(HarnessError::Config)?;
        if eps.is_empty() || eps.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
            return Err(HarnessError::Config(format!(
                "epsilon values must be finite and >= 0, got {eps:?}"
            )));
        }
        Ok(eps)
    }

    /// Checks sweep-level fields and expands the generator grid in config order:
    /// family, then n, then the family parameters.
    pub fn plan(&self, experiment: ExperimentKind) -> Result<GridPlan, HarnessError> {
        let err = |m: String| Err(HarnessError::Config(m));
        if self.trials < 1 {
            return err("trials must be at least 1".into());
        }
        if self.sizes.is_empty() {
            return err("sizes must not be empty".into());
        }
        if !(1..=crate::neighborhoods::MAX_TRAIL_K).contains(&self.k) {
            return err(format!(
                "k must be in 1..={}, got {}",
                crate::neighborhoods::MAX_TRAIL_K,
                self.k
            ));
        }
        if experiment == ExperimentKind::ModelSweep {
            if self.agg.is_empty() || self.generating.is_empty() {
                return err("agg and generating must not be empty".into());
            }
            if let Some(s) = self.generating.iter().find(|s| !s.is_set_valued()) {
                return err(format!("generating semantics {s} is not set-valued"));
            }
            self.epsilons()?;
        }
        let values = |g: &Grid, name: &str| {
            g.values()
                .map_err(|e| HarnessError::Config(format!("{name}: {e}")))
        };
        let er_p = values(&self.er_p, "er_p")?;
        let ba_power = values(&self.ba_power, "ba_power")?;
        let ws_p = values(&self.ws_p, "ws_p")?;

        let mut plan = GridPlan::default();
        let mut models = Vec::new();
        for family in self.families_for(experiment) {
            for &n in &self.sizes {
                match family {
                    Family::ErdosRenyi => {
                        models.extend(er_p.iter().map(|&p| GraphModel::ErdosRenyi { n, p }));
                    }
                    Family::BarabasiAlbert => {
                        for &power in &ba_power {
                            models.extend(self.ba_m.iter().map(|&m| GraphModel::BarabasiAlbert {
                                n,
                                power,
                                m,
                            }));
                        }
                    }
                    Family::WattsStrogatz => {
                        for &nei in &self.ws_nei {
                            if nei >= 1 && n >= 1 && nei > (n - 1) / 2 {
                                plan.skipped_infeasible.push((n, nei));
                                continue;
                            }
                            models.extend(ws_p.iter().map(|&p| GraphModel::WattsStrogatz { n, nei, p }));
                        }
                    }
                }
            }
        }
        for (index, model) in models.into_iter().enumerate() {
            model
                .validate()
                .map_err(|e| HarnessError::Config(format!("grid point {index}: {e}")))?;
            plan.points.push(GridPoint { index, model });
        }
        Ok(plan)
    }

    /// Grid indices selected by `grid_start` / `grid_end`.
    pub fn selected_range(&self, total: usize) -> std::ops::Range<usize> {
        let end = self.grid_end.unwrap_or(total).min(total);
        self.grid_start.min(end)..end
    }
}

/// Splits `key=value`. The value is read as a TOML value when it parses as
/// one, as a list when it contains commas, and as a bare string otherwise.
fn parse_override(assignment: &str) -> Result<(String, toml::Value), HarnessError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("override {assignment:?} is not key=value")))?;
    let key = key.trim().replace('-', "_");
    let raw = raw.trim();
    let scalar = |s: &str| -> toml::Value {
        format!("v = {s}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(s.to_string()))
    };
    let value = match scalar(raw) {
        toml::Value::String(s) if s.contains(',') && !s.contains(':') => {
            toml::Value::Array(s.split(',').map(|p| scalar(p.trim())).collect())
        }
        v => v,
    };
    Ok((key, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grids_match_the_published_sweep() {
        let c = ExperimentConfig::default();
        assert_eq!(
            c.er_p.values().unwrap(),
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
        );
        assert_eq!(
            c.ba_power.values().unwrap(),
            vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
        );
        assert_eq!(c.ws_p.values().unwrap(), vec![0.1, 0.3, 0.5, 0.7, 0.9]);
        assert_eq!(c.trials, 500);
    }

    #[test]
    fn toml_and_overrides() {
        let c = ExperimentConfig::from_toml_str(
            "families = \"er\"\nsizes = [10, 20]\ner_p = \"0.2:0.4:0.1\"\ntrials = 3\n",
        )
        .unwrap();
        assert_eq!(c.families, Some(vec![Family::ErdosRenyi]));
        assert_eq!(c.er_p.values().unwrap(), vec![0.2, 0.3, 0.4]);
        let mut c = c;
        c.set("trials=9").unwrap();
        c.set("families=er,ws").unwrap();
        c.set("ws_p=0.5").unwrap();
        c.set("agg=mean").unwrap();
        c.set("base-seed=11").unwrap();
        assert_eq!(c.trials, 9);
        assert_eq!(c.families, Some(vec![Family::ErdosRenyi, Family::WattsStrogatz]));
        assert_eq!(c.ws_p.values().unwrap(), vec![0.5]);
        assert_eq!(c.agg, vec![AggKind::Mean]);
        assert_eq!(c.base_seed, 11);
        assert_eq!(c.sizes, vec![10, 20]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml_str("trails = 3").is_err());
        assert!(ExperimentConfig::load(None, &["nope=1".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["trials".into()]).is_err());
    }

    #[test]
    fn plan_orders_and_skips_infeasible_lattices() {
        let c = ExperimentConfig {
            sizes: vec![10, 50],
            ..ExperimentConfig::default()
        };
        let plan = c.plan(ExperimentKind::JaccardSweep).unwrap();
        // er: 2 sizes * 9 p; ba: 2 * 7 powers; ws: n=10 only nei=1 (5 p), n=50 all three.
        assert_eq!(plan.points.len(), 18 + 14 + 5 + 15);
        assert_eq!(plan.skipped_infeasible, vec![(10, 5), (10, 10)]);
        assert_eq!(plan.points[0].model, GraphModel::ErdosRenyi { n: 10, p: 0.1 });
        assert!(plan.points.iter().enumerate().all(|(i, p)| p.index == i));
        let model = c.plan(ExperimentKind::ModelSweep).unwrap();
        assert_eq!(model.points.len(), 18 + 5 + 15);
    }

    #[test]
    fn plan_rejects_out_of_range_parameters() {
        let d = ExperimentConfig::default;
        let bad_p = ExperimentConfig {
            er_p: Grid::Many(vec![1.5]),
            ..d()
        };
        assert!(bad_p.plan(ExperimentKind::JaccardSweep).is_err());
        let no_trials = ExperimentConfig { trials: 0, ..d() };
        assert!(no_trials.plan(ExperimentKind::JaccardSweep).is_err());
        let bad_eps = ExperimentConfig {
            epsilon: Grid::One(-1.0),
            ..d()
        };
        assert!(bad_eps.plan(ExperimentKind::ModelSweep).is_err());
        let counts = ExperimentConfig {
            generating: vec![SemanticsKind::PathCountK],
            ..d()
        };
        assert!(counts.plan(ExperimentKind::ModelSweep).is_err());
    }

    #[test]
    fn selected_range_clamps() {
        let mut c = ExperimentConfig::default();
        assert_eq!(c.selected_range(10), 0..10);
        c.grid_start = 4;
        c.grid_end = Some(20);
        assert_eq!(c.selected_range(10), 4..10);
        c.grid_start = 12;
        assert_eq!(c.selected_range(10), 10..10);
    }
}
