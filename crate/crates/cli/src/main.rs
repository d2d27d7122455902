use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use fof_core::generators::{Family, GeneratorSpec, GraphModel};
use fof_core::graph::load_edge_list_path;
use fof_core::harness::{self, ExperimentConfig, ExperimentKind, SweepReport};
use fof_core::modelfit::{compare_semantics_with, FitOptions};
use fof_core::setstats::{jaccard_graph_with, JaccardOptions};
use fof_core::synth::synthesize;
use fof_core::{AggKind, AttributeTableF64, JaccardSummaryF64, SemanticsKind};

#[derive(Parser)]
#[command(
    name = "fof",
    version,
    about = "Friends-of-friends neighborhood semantics experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph and write it as an edge list.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Jaccard distance between two semantics on one edge list.
    Jaccard {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "strict")]
        kind_a: SemanticsKind,
        #[arg(long, default_value = "path")]
        kind_b: SemanticsKind,
        /// Also write `vertex,jaccard` for every vertex to this file.
        #[arg(long)]
        per_node: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Draw treatment and outcome attributes for a graph.
    Synth {
        input: PathBuf,
        #[arg(long, default_value = "strict")]
        semantics: SemanticsKind,
        #[arg(long, default_value = "mean")]
        agg: AggKind,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit both semantics to an attribute table and report the better one.
    Fit {
        input: PathBuf,
        attributes: PathBuf,
        /// Aggregate used for the covariate; defaults to the table's own.
        #[arg(long)]
        agg: Option<AggKind>,
        #[arg(long)]
        drop_empty: bool,
    },
    /// Sweep the generator grid and record Jaccard distances.
    SweepJaccard(SweepArgs),
    /// Sweep the generator grid and compare model fits on synthetic attributes.
    SweepModel(SweepArgs),
    /// Jaccard statistics for the SNAP networks next to their published values.
    SnapTable {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        include_large: bool,
        /// Download datasets that are not present locally.
        #[arg(long)]
        fetch: bool,
        /// Restrict to these datasets.
        #[arg(long = "dataset")]
        datasets: Vec<String>,
    },
    /// Download SNAP datasets.
    Fetch {
        /// Dataset names; empty fetches the default selection.
        names: Vec<String>,
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        #[arg(long)]
        include_large: bool,
    },
    /// Pivot a sweep CSV into one row per curve.
    PlotData {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    power: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nei: Option<usize>,
}

impl ModelArgs {
    fn model(&self) -> Result<GraphModel> {
        let need = |v: Option<f64>, name: &str| {
            v.with_context(|| format!("--{name} is required for {}", self.family))
        };
        Ok(match self.family {
            Family::ErdosRenyi => GraphModel::ErdosRenyi {
                n: self.n,
                p: need(self.p, "p")?,
            },
            Family::BarabasiAlbert => GraphModel::BarabasiAlbert {
                n: self.n,
                power: self.power.unwrap_or(1.0),
                m: self.m.unwrap_or(1),
            },
            Family::WattsStrogatz => GraphModel::WattsStrogatz {
                n: self.n,
                nei: self.nei.context("--nei is required for ws")?,
                p: need(self.p, "p")?,
            },
        })
    }
}

#[derive(Args)]
struct CommonArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set sizes=10,50`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Keep the complete grid points already in the output file and run the rest.
    #[arg(long, requires = "out")]
    resume: bool,
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(common.config.as_deref(), &common.sets)?;
    if let Some(w) = common.workers {
        config.workers = w;
    }
    if let Some(o) = &common.out {
        config.out = Some(o.clone());
    }
    Ok(config)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn report_sweep(r: &SweepReport) {
    eprintln!(
        "grid points {}..{} of {}, {} rows",
        r.grid.start, r.grid.end, r.grid_total, r.rows
    );
    for (n, nei) in &r.skipped_infeasible {
        eprintln!("skipped ws n={n} nei={nei}: lattice needs n >= 2*nei + 1");
    }
    if r.rewires_skipped > 0 {
        eprintln!(
            "{} rewiring steps skipped after exhausting retries",
            r.rewires_skipped
        );
    }
    if r.failed_fits > 0 {
        eprintln!("{} fits failed; see the error column", r.failed_fits);
    }
}

fn sweep(args: &SweepArgs, kind: ExperimentKind) -> Result<()> {
    let mut config = load_config(&args.common)?;
    if let Some(s) = args.seed {
        config.base_seed = s;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(e) = config.experiment {
        if e != kind {
            bail!("config is for {e}, not {kind}");
        }
    }
    let report = if args.resume {
        let path = config.out.clone().context("--resume needs an output file")?;
        harness::resume_sweep(&config, kind, &path)?
    } else {
        let mut out = output(config.out.as_deref())?;
        let r = harness::run_sweep(&config, kind, &mut out)?;
        out.flush()?;
        r
    };
    report_sweep(&report);
    Ok(())
}

fn print_summary(s: &JaccardSummaryF64) {
    println!("vertices        {}", s.vertex_count);
    println!("mean            {}", s.mean);
    println!("max             {}", s.max);
    println!("mean_nonempty   {}", s.mean_nonempty);
    println!("n_both_empty    {}", s.n_both_empty);
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { model, seed, out } => {
            let spec = GeneratorSpec::new(model.model()?, seed);
            let (g, report) = spec.generate()?;
            if report.rewires_skipped > 0 {
                eprintln!(
                    "{} rewiring steps skipped after exhausting retries",
                    report.rewires_skipped
                );
            }
            let mut w = output(out.as_deref())?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
        }
        Command::Jaccard {
            input,
            k,
            kind_a,
            kind_b,
            per_node,
            workers,
        } => {
            let loaded = load_edge_list_path(&input).with_context(|| input.display().to_string())?;
            let g = loaded.graph;
            let options = JaccardOptions {
                retain_per_node: per_node.is_some(),
            };
            let s: JaccardSummaryF64 =
                harness::with_workers(workers, || jaccard_graph_with(&g, kind_a, kind_b, k, options))??;
            print_summary(&s);
            if let (Some(path), Some(values)) = (per_node, &s.per_node) {
                let mut w = output(Some(&path))?;
                writeln!(w, "vertex,jaccard")?;
                for (v, d) in g.vertices().zip(values) {
                    writeln!(w, "{},{d}", g.label(v))?;
                }
                w.flush()?;
            }
        }
        Command::Synth {
            input,
            semantics,
            agg,
            epsilon,
            seed,
            out,
        } => {
            let g = load_edge_list_path(&input)
                .with_context(|| input.display().to_string())?
                .graph;
            let table = synthesize::<f64>(&g, semantics, agg, epsilon, seed)?;
            let mut w = output(out.as_deref())?;
            table.write_csv(&mut w, g.labels())?;
        }
        Command::Fit {
            input,
            attributes,
            agg,
            drop_empty,
        } => {
            let g = load_edge_list_path(&input)
                .with_context(|| input.display().to_string())?
                .graph;
            let file = File::open(&attributes).with_context(|| attributes.display().to_string())?;
            let table = AttributeTableF64::read_csv(BufReader::new(file))
                .with_context(|| attributes.display().to_string())?;
            let agg = agg.unwrap_or(table.params.agg);
            let cmp = compare_semantics_with(&g, &table, agg, FitOptions { drop_empty })?;
            println!("semantics,beta0,beta1,sigma2,log_likelihood,n_used,floored");
            for f in [&cmp.strict, &cmp.path] {
                println!(
                    "{},{},{},{},{},{},{}",
                    f.semantics.map(|s| s.to_string()).unwrap_or_default(),
                    f.beta0,
                    f.beta1,
                    f.sigma2,
                    f.log_likelihood,
                    f.n_used,
                    f.floored
                );
            }
            match cmp.winner() {
                Some(w) => eprintln!("better fit: {w}"),
                None => eprintln!("tie"),
            }
        }
        Command::SweepJaccard(args) => sweep(&args, ExperimentKind::JaccardSweep)?,
        Command::SweepModel(args) => sweep(&args, ExperimentKind::ModelSweep)?,
        Command::SnapTable {
            common,
            data_dir,
            include_large,
            fetch,
            datasets,
        } => {
            let mut config = load_config(&common)?;
            if let Some(d) = data_dir {
                config.data_dir = d;
            }
            config.include_large |= include_large;
            config.fetch |= fetch;
            if !datasets.is_empty() {
                config.datasets = datasets;
            }
            let mut out = output(config.out.as_deref())?;
            let report = harness::run_snap_table(&config, &mut out)?;
            out.flush()?;
            for row in report.rows.iter().filter(|r| r.error.is_some()) {
                eprintln!("{}: {}", row.info.name, row.error.as_deref().unwrap_or_default());
            }
            if report.failures() > 0 {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Fetch {
            names,
            data_dir,
            include_large,
        } => {
            let names: Vec<String> = if names.is_empty() {
                fof_core::dataset::default_selection(include_large)
                    .iter()
                    .map(|d| d.name.to_string())
                    .collect()
            } else {
                names
            };
            let mut failed = 0;
            for name in &names {
                match fof_core::fetch::fetch_dataset(name, &data_dir) {
                    Ok(path) => eprintln!("{name}: {}", path.display()),
                    Err(e) => {
                        failed += 1;
                        eprintln!("{name}: {e}");
                    }
                }
            }
            if failed > 0 {
                return Ok(ExitCode::from(2));
            }
        }
        Command::PlotData { input, out } => {
            let file = File::open(&input).with_context(|| input.display().to_string())?;
            let mut w = output(out.as_deref())?;
            harness::pivot_for_plot(BufReader::new(file), &mut w)?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
