//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::conic::SolverSettings;
use crate::error::SpcaError;
use crate::exact::{solve_exact, SolveOptions};
use crate::experiment::{run_experiment, ExperimentConfig, Method};
use crate::heuristics::{forward_greedy, sorting_baseline, tpm_default};
use crate::instance::{bundled, load_csv, Budget, CsvMode, Instance};
use crate::oracle::{brute_force, DEFAULT_MAX_SUBSETS};
use crate::relax::{solve_relaxation, PsdMode, RelaxationKind, RelaxationTag};
use crate::report::Report;
use crate::rounding::{greedy_round, gw_round, DEFAULT_GW_SAMPLES};
use crate::spiked::SpikedModel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_INCUMBENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spca", version, about = "Sparse principal component analysis: exact, relaxed and heuristic solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance, or run a spiked-covariance experiment with `--mode experiment`.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Relax,
    RelaxRound,
    Heuristic,
    Oracle,
    Experiment,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Relax => "relax",
            Mode::RelaxRound => "relax-round",
            Mode::Heuristic => "heuristic",
            Mode::Oracle => "oracle",
            Mode::Experiment => "experiment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Heuristic {
    Tpm,
    Greedy,
    Sorting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CsvKind {
    /// p×p covariance or correlation matrix.
    Covariance,
    /// Observations in rows, variables in columns.
    Data,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// CSV file with a covariance matrix or a data matrix.
    #[arg(long, conflicts_with = "bundled")]
    input: Option<PathBuf>,
    /// Bundled dataset name (pitprops).
    #[arg(long)]
    bundled: Option<String>,
    #[arg(long, value_enum, default_value = "covariance")]
    csv_kind: CsvKind,
    /// Scale data columns to unit variance before forming the covariance.
    #[arg(long)]
    normalize: bool,
    /// Cardinality budget.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value = "strong")]
    relaxation: RelaxationTag,
    /// exact, minors or minors-cuts=N; defaults by problem size.
    #[arg(long)]
    psd_mode: Option<PsdMode>,
    #[arg(long, value_enum, default_value = "tpm")]
    heuristic: Heuristic,
    #[arg(long, default_value_t = 1e-3)]
    gap_tol: f64,
    /// Wall-clock limit in seconds (per solve in experiments).
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gaussian rounding samples for the dnn relaxation.
    #[arg(long, default_value_t = DEFAULT_GW_SAMPLES)]
    samples: usize,
    /// Report path (JSON, or CSV rows in experiment mode); stdout by default.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-node CSV trace of the exact solver.
    #[arg(long)]
    trace: Option<PathBuf>,

    /// Experiment: JSON summary path.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = 150)]
    p: usize,
    #[arg(long, default_value_t = 150)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    snr: f64,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    /// Comma-separated k values.
    #[arg(long, value_delimiter = ',', default_values_t = vec![5, 10, 15, 20, 25, 30, 35, 40])]
    k_grid: Vec<usize>,
    /// Comma-separated methods: exact, relax-round, greedy, tpm, sorting.
    #[arg(long, value_delimiter = ',', default_values_t = Method::ALL.iter().map(|m| m.as_str().to_string()).collect::<Vec<_>>())]
    methods: Vec<String>,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl From<SpcaError> for Failure {
    fn from(e: SpcaError) -> Self {
        let code = match e {
            SpcaError::Write(_) => 1,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Solve(args) => solve(&args),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SPCA_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn load_instance(args: &SolveArgs) -> std::result::Result<Instance, Failure> {
    match (&args.input, &args.bundled) {
        (Some(path), None) => {
            let mode = match args.csv_kind {
                CsvKind::Covariance => CsvMode::Covariance,
                CsvKind::Data => CsvMode::DataMatrix,
            };
            Ok(load_csv(path, mode, args.normalize)?)
        }
        (None, Some(name)) => Ok(bundled(name)?),
        _ => Err(input_error("exactly one of --input or --bundled is required")),
    }
}

fn budget(args: &SolveArgs, p: usize) -> std::result::Result<Budget, Failure> {
    match args.k {
        None => Err(input_error("--k is required")),
        Some(0) => Err(input_error("k must be ≥ 1")),
        Some(k) => Ok(Budget::new(k, p)?),
    }
}

fn time_limit(args: &SolveArgs) -> std::result::Result<Option<Duration>, Failure> {
    match args.time_limit {
        None => Ok(None),
        Some(t) if t.is_finite() && t >= 0.0 => Ok(Some(Duration::from_secs_f64(t))),
        Some(t) => Err(input_error(format!("invalid time limit {t}"))),
    }
}

fn open_output(path: Option<&Path>) -> std::result::Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| SpcaError::Io {
            path: p.to_path_buf(),
            source,
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn solve(args: &SolveArgs) -> std::result::Result<i32, Failure> {
    if !(args.gap_tol >= 0.0) {
        return Err(input_error("gap tolerance must be nonnegative"));
    }
    if args.mode == Mode::Experiment {
        return experiment(args);
    }
    let inst = load_instance(args)?;
    let k = budget(args, inst.p())?;
    let limit = time_limit(args)?;
    let start = Instant::now();
    let name = inst.name().to_string();
    let mode = args.mode.as_str();
    let mut code = EXIT_OK;

    let mut report = match args.mode {
        Mode::Exact => {
            let opts = SolveOptions {
                gap_tol: args.gap_tol,
                time_limit: limit,
                node_limit: args.node_limit,
                trace: args.trace.is_some(),
                ..SolveOptions::default()
            };
            let rep = solve_exact(&inst, k, &opts)?;
            if let Some(path) = &args.trace {
                rep.write_trace(open_output(Some(path))?)?;
            }
            if rep.incumbent.is_none() {
                code = EXIT_NO_INCUMBENT;
            }
            Report::from_exact(&name, k.get(), &rep)
        }
        Mode::Relax | Mode::RelaxRound => {
            let psd = args.psd_mode.unwrap_or_else(|| PsdMode::default_for(inst.p()));
            let kind = RelaxationKind::new(args.relaxation, psd);
            let settings = SolverSettings { time_limit: limit, ..SolverSettings::default() };
            let rel = solve_relaxation(&inst, k, kind, &settings)?;
            let mut rep = Report::new(&name, k.get(), mode);
            if args.mode == Mode::RelaxRound {
                let point = match &rel.z_matrix {
                    Some(zm) if args.samples > 0 => gw_round(&inst, k, &rel.z_frac, zm, args.samples, args.seed),
                    _ => greedy_round(&inst, k, &rel.z_frac),
                };
                rep = rep.with_point(&point);
            }
            rep = rep.with_upper(rel.upper_bound);
            rep.cuts = rel.cuts_added;
            rep.iterations = rel.iterations;
            rep.status = rel.status.as_str().to_string();
            rep
        }
        Mode::Heuristic => {
            let point = match args.heuristic {
                Heuristic::Tpm => tpm_default(&inst, k),
                Heuristic::Greedy => forward_greedy(&inst, k),
                Heuristic::Sorting => sorting_baseline(&inst, k),
            };
            let mut rep = Report::new(&name, k.get(), mode).with_point(&point);
            rep.status = "feasible".into();
            rep
        }
        Mode::Oracle => {
            let point = brute_force(&inst, k, DEFAULT_MAX_SUBSETS)?;
            let mut rep = Report::new(&name, k.get(), mode).with_point(&point).with_upper(point.objective);
            rep.status = "optimal".into();
            rep
        }
        Mode::Experiment => unreachable!("handled above"),
    };
    if args.mode != Mode::Exact {
        report.time_seconds = start.elapsed().as_secs_f64();
    }
    report.write_to(open_output(args.output.as_deref())?)?;
    Ok(code)
}

fn experiment(args: &SolveArgs) -> std::result::Result<i32, Failure> {
    let model = SpikedModel { p: args.p, n: args.n, sigma_snr: args.snr, seed: args.seed };
    let mut cfg = ExperimentConfig::new(model, args.instances);
    cfg.k_grid = args.k_grid.clone();
    if cfg.k_grid.iter().any(|&k| k == 0) {
        return Err(input_error("k must be ≥ 1"));
    }
    cfg.methods = args
        .methods
        .iter()
        .map(|m| m.parse::<Method>().map_err(input_error))
        .collect::<std::result::Result<_, _>>()?;
    if let Some(t) = time_limit(args)? {
        cfg.exact_time_limit = t;
    }
    let psd = args.psd_mode.unwrap_or_else(|| PsdMode::default_for(args.p));
    cfg.relaxation = RelaxationKind::new(args.relaxation, psd);
    let result = run_experiment(&cfg)?;
    result.write_csv(open_output(args.output.as_deref())?)?;
    if let Some(path) = &args.summary {
        open_output(Some(path))?.write_all(result.summary_json()?.as_bytes()).map_err(SpcaError::from)?;
    } else {
        eprint!("{}", result.summary_json()?);
    }
    Ok(EXIT_OK)
}
