//! The `tefs` command line: `select`, `synth`, `bench` and `estimate`.
//!
//! Exit codes: 0 on success, 1 on runtime or numeric failure, 2 on usage and
//! validation errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{transfer_entropy, Backend, EstimatorConfig};
use crate::evaluation::{run_benchmark_with_threads, write_reports, BenchmarkConfig};
use crate::scm::{extend_with_noise_triples, generate, sample_coefficients, BuiltinGraph, ScmSpec};
use crate::selection::{select, Direction, SelectionConfig, SelectionResult, Task};
use crate::timeseries::{load_csv, standardize, LagSpec, TimeSeriesDataset};

#[derive(Debug, Parser)]
#[command(name = "tefs", version, about = "Causal feature selection with transfer entropy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run forward or backward selection on a CSV file.
    Select(SelectArgs),
    /// Simulate a linear SCM and write data.csv and truth.json.
    Synth(SynthArgs),
    /// Run a benchmark suite described by a JSON config.
    Bench(BenchArgs),
    /// Estimate one conditional transfer entropy.
    Estimate(EstimateArgs),
}

#[derive(Debug, Args, Clone)]
pub struct EstimatorFlags {
    /// ksg, gaussian, gaussian-bic or discrete.
    #[arg(long)]
    pub estimator: Option<Backend>,
    /// KSG neighbour count.
    #[arg(long)]
    pub k: Option<usize>,
    /// Seed of the KSG tie-breaking jitter.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl EstimatorFlags {
    fn apply(&self, cfg: &mut EstimatorConfig) {
        if let Some(b) = self.estimator {
            cfg.backend = b;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub direction: Option<Direction>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// delta (backward) or Delta (forward).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Bound on |Y|; defaults to the largest absolute target value.
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[command(flatten)]
    pub estimator: EstimatorFlags,
    #[arg(long)]
    pub task: Option<Task>,
    #[arg(long)]
    pub no_standardize: bool,
    #[arg(long)]
    pub epsilon_stop: Option<f64>,
    /// Multiplicity charge per candidate pool, in units of ln(D) / n.
    #[arg(long)]
    pub ebic_gamma: Option<f64>,
    /// JSON file with any of the above; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Everything `select` needs, as read from `--config` and then overridden by flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectFile {
    pub data: Option<PathBuf>,
    pub target: Option<String>,
    pub direction: Option<Direction>,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub threshold: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub task: Option<Task>,
    pub estimator: Option<EstimatorConfig>,
    pub standardize: Option<bool>,
    pub epsilon_stop: Option<f64>,
    pub ebic_gamma: Option<f64>,
}

/// The fully resolved `select` run, echoed alongside the result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectRun {
    pub data: PathBuf,
    pub target: String,
    pub direction: Direction,
    pub standardize: bool,
    pub selection: SelectionConfig,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SelectOutput {
    pub config: SelectRun,
    pub feature_names: Vec<String>,
    pub result: SelectionResult,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// graph3, graph5, graph10, or a path to an SCM spec JSON.
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Noise triples appended to a builtin graph.
    #[arg(long, default_value_t = 0)]
    pub triples: usize,
    /// Draw banded coefficients with this seed instead of using the canonical ones.
    #[arg(long)]
    pub coef_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for report.json and report.csv.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; falls back to TEFS_JOBS, then the processor count.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub target: String,
    /// Comma-separated source columns.
    #[arg(long, value_delimiter = ',', required = true)]
    pub source: Vec<String>,
    /// Comma-separated conditioning columns.
    #[arg(long, value_delimiter = ',')]
    pub cond: Vec<String>,
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "M")]
    pub m: usize,
    #[command(flatten)]
    pub estimator: EstimatorFlags,
    #[arg(long)]
    pub no_standardize: bool,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

fn missing(flag: &str) -> Error {
    Error::InvalidConfig(format!("missing required --{flag}"))
}

/// Load `path` and prepare it for estimation. The discrete backend needs the
/// raw integer symbols, so it is never standardized.
fn load_for(path: &Path, target: &str, standardize_data: bool, backend: Backend) -> Result<TimeSeriesDataset> {
    let ds = load_csv(path, target)?;
    if standardize_data && backend != Backend::DiscretePlugin {
        standardize(&ds)
    } else {
        Ok(ds)
    }
}

pub fn resolve_select(args: &SelectArgs) -> Result<SelectRun> {
    let file: SelectFile = match &args.config {
        Some(p) => read_json(p)?,
        None => SelectFile::default(),
    };
    let mut estimator = file.estimator.unwrap_or_default();
    args.estimator.apply(&mut estimator);
    let l = args.l.or(file.l).ok_or_else(|| missing("L"))?;
    let m = args.m.or(file.m).ok_or_else(|| missing("M"))?;
    let selection = SelectionConfig {
        lags: LagSpec::new(l, m)?,
        threshold: args.threshold.or(file.threshold).ok_or_else(|| missing("threshold"))?,
        target_bound: args.b.or(file.b),
        task: args.task.or(file.task).unwrap_or_default(),
        estimator,
        epsilon_stop: args.epsilon_stop.or(file.epsilon_stop).unwrap_or(0.0),
        ebic_gamma: args.ebic_gamma.or(file.ebic_gamma).unwrap_or(0.0),
    };
    selection.validate()?;
    Ok(SelectRun {
        data: args.data.clone().or(file.data).ok_or_else(|| missing("data"))?,
        target: args.target.clone().or(file.target).ok_or_else(|| missing("target"))?,
        direction: args.direction.or(file.direction).ok_or_else(|| missing("direction"))?,
        standardize: !args.no_standardize && file.standardize.unwrap_or(true),
        selection,
    })
}

pub fn cmd_select(args: &SelectArgs, out: &mut dyn Write) -> Result<()> {
    let run = resolve_select(args)?;
    let ds = load_for(&run.data, &run.target, run.standardize, run.selection.estimator.backend)?;
    let result = single_threaded(|| select(&ds, &run.selection, run.direction))?;
    let output = SelectOutput {
        feature_names: ds.feature_names().to_vec(),
        config: run,
        result,
    };
    serde_json::to_writer_pretty(&mut *out, &output)?;
    writeln!(out).map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let spec = match args.graph.parse::<BuiltinGraph>() {
        Ok(g) => {
            let mut tpl = g.template();
            let mut edges = match args.coef_seed {
                Some(s) => sample_coefficients(&tpl.edges, s),
                None => g.canonical_edges(),
            };
            if args.triples > 0 {
                let base = tpl.edges.len();
                tpl = extend_with_noise_triples(&tpl, args.triples, args.seed);
                edges.extend(sample_coefficients(&tpl.edges[base..], args.seed));
            }
            tpl.into_spec(edges, args.noise, args.n, args.seed)
        }
        Err(_) if Path::new(&args.graph).is_file() => {
            let spec: ScmSpec = read_json(Path::new(&args.graph))?;
            if args.triples > 0 {
                return Err(Error::InvalidConfig("--triples only applies to builtin graphs".into()));
            }
            spec
        }
        Err(e) => return Err(e),
    };
    let (ds, truth) = generate(&spec)?;

    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let data_path = args.out.join("data.csv");
    let f = std::fs::File::create(&data_path).map_err(|e| Error::io(&data_path, e))?;
    ds.write_csv(std::io::BufWriter::new(f))?;
    let truth_path = args.out.join("truth.json");
    let f = std::fs::File::create(&truth_path).map_err(|e| Error::io(&truth_path, e))?;
    serde_json::to_writer_pretty(f, &serde_json::json!({ "truth": truth, "spec": spec }))?;
    writeln!(
        out,
        "wrote {} rows x {} features to {}",
        ds.len(),
        ds.n_features(),
        data_path.display()
    )
    .map_err(|e| Error::io("<stdout>", e))
}

fn job_count(flag: Option<usize>) -> Result<usize> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var("TEFS_JOBS") {
            Ok(v) => v
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("TEFS_JOBS=`{v}` is not a count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(Error::InvalidConfig("--jobs must be at least 1".into()));
    }
    Ok(n)
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let cfg: BenchmarkConfig = read_json(&args.config).map_err(|e| match e {
        Error::Json(j) => Error::InvalidBenchmark(j.to_string()),
        other => other,
    })?;
    cfg.validate()?;
    let reports = run_benchmark_with_threads(&cfg, job_count(args.jobs)?)?;
    write_reports(&reports, &args.out)?;
    let io = |e| Error::io("<stdout>", e);
    writeln!(out, "{:<24} {:>6} {:>6} {:>9}", "point", "TPR", "FPR", "R2 test").map_err(io)?;
    for r in &reports {
        writeln!(out, "{:<24} {:>6.3} {:>6.3} {:>9.3}", r.label, r.tpr, r.fpr, r.r2_test)
            .map_err(io)?;
    }
    Ok(())
}

fn column_indices(ds: &TimeSeriesDataset, names: &[String]) -> Result<BTreeSet<usize>> {
    names
        .iter()
        .filter(|n| !n.is_empty())
        .map(|n| ds.feature_index(n).ok_or_else(|| Error::MissingColumn(n.clone())))
        .collect()
}

pub fn cmd_estimate(args: &EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = EstimatorConfig::default();
    args.estimator.apply(&mut cfg);
    cfg.validate()?;
    let lags = LagSpec::new(args.l, args.m)?;
    if let Some(c) = args.source.iter().find(|s| args.cond.contains(s)) {
        return Err(Error::InvalidConfig(format!("column `{c}` is both source and condition")));
    }
    let ds = load_for(&args.data, &args.target, !args.no_standardize, cfg.backend)?;
    let source = column_indices(&ds, &args.source)?;
    let cond = column_indices(&ds, &args.cond)?;
    let te = single_threaded(|| transfer_entropy(&ds, &source, &cond, lags, &cfg))?;
    writeln!(out, "{te:.6}").map_err(|e| Error::io("<stdout>", e))
}

// only bench fans out; everything else runs on one worker
fn single_threaded<R: Send>(f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    match rayon::ThreadPoolBuilder::new().num_threads(1).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Parse `argv`, run the command and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let res = match &cli.command {
        Command::Bench(a) => cmd_bench(a, &mut out),
        Command::Select(a) => cmd_select(a, &mut out),
        Command::Synth(a) => cmd_synth(a, &mut out),
        Command::Estimate(a) => cmd_estimate(a, &mut out),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}
