//! Command-line front end: `teneig {z|h|zodd|gen|baseline}`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::{nqz, sshopm, IterationReport, DEFAULT_MAX_EVAL};
use crate::error::{Category, Error, Result};
use crate::generators::{example_3eig, pagerank, scaled_laplacian, signless_laplacian};
use crate::homotopy::{sample_generator, EigenKind, HomotopyProblem};
use crate::io::{format_tensor, read_tensor, write_trace_csv, Report, RunStats};
use crate::multi_eigen::{find_odd_z, OddSearchConfig};
use crate::tracker::{track_h, track_z, CurveTrace, Direction, TrackerConfig};

#[derive(Debug, Parser)]
#[command(name = "teneig", version, about = "Nonnegative tensor eigenpairs by homotopy continuation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Track one Z-eigenpair from a random rank-1 start.
    Z(SolveArgs),
    /// Track the positive H-eigenpair.
    H(SolveArgs),
    /// Collect an odd number of positive Z-eigenpairs.
    Zodd(OddArgs),
    /// Write one of the built-in test tensors.
    Gen(GenArgs),
    /// Run a reference power iteration.
    Baseline(BaselineArgs),
}

#[derive(Debug, Args)]
pub struct TrackerArgs {
    /// Newton tolerance for the corrector.
    #[arg(long)]
    pub tol: Option<f64>,
    /// JSON file with tracker settings (camelCase keys, missing keys default).
    #[arg(long, value_name = "PATH")]
    pub tracker_config: Option<PathBuf>,
}

impl TrackerArgs {
    fn config(&self) -> Result<TrackerConfig> {
        let mut cfg = match &self.tracker_config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => TrackerConfig::default(),
        };
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(Error::InvalidInput(format!("--tol must be positive, got {tol}")));
            }
            cfg.newton_tol = tol;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Write the tracked curve as CSV.
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
    /// Seed for the random start; `h` uses a uniform start when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub tracker: TrackerArgs,
}

#[derive(Debug, Args)]
pub struct OddArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random rank-1 starts.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[command(flatten)]
    pub tracker: TrackerArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub which: GenKind,
    #[arg(short, long, value_name = "PATH", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Signless Laplacian of the cyclic m-uniform hypergraph on n vertices.
    Laplacian {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// `D + w C` for the same hypergraph.
    ScaledLaplacian {
        #[arg(long)]
        w: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Order-3 PageRank tensor on six pages with damping `alpha`.
    Pagerank {
        #[arg(long)]
        alpha: f64,
    },
    /// 2x2x2x2 symmetric tensor with three positive Z-eigenpairs.
    ThreeEig,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(subcommand)]
    pub method: BaselineMethod,
    #[arg(long, value_name = "PATH", global = true)]
    pub input: Option<PathBuf>,
    #[arg(short, long, value_name = "PATH", global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10, global = true)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_EVAL, global = true)]
    pub max_eval: usize,
    /// Seed for a random positive start; all-ones when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum BaselineMethod {
    /// NQZ power iteration for the largest H-eigenvalue.
    Nqz,
    /// Shifted symmetric higher-order power method.
    Sshopm {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
}

/// Exit status for a failure category.
pub fn exit_code(category: Category) -> i32 {
    match category {
        Category::Input => 2,
        Category::Stalled => 3,
        Category::Budget => 4,
        Category::Anomaly => 5,
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_trace(path: Option<&Path>, trace: &CurveTrace) -> Result<()> {
    if let Some(path) = path {
        let mut w = BufWriter::new(File::create(path)?);
        write_trace_csv(trace, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn tracked_stats(trace: &CurveTrace) -> RunStats {
    RunStats {
        steps: Some(trace.steps),
        evaluations: Some(trace.evaluations),
        turning_points: Some(trace.turning_points.iter().map(|tp| tp.t).collect()),
        ..RunStats::default()
    }
}

fn uniform_h_generator(n: usize, m: usize) -> Vec<f64> {
    vec![(n as f64).powf(-((m - 1) as f64) / m as f64); n]
}

fn run_z(args: &SolveArgs) -> Result<String> {
    let a = read_tensor(&args.input)?;
    let cfg = args.tracker.config()?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.unwrap_or(0));
    let gen = sample_generator(&mut rng, a.dim(), OddSearchConfig::default().norm_range);
    let p = HomotopyProblem::new(&a, gen, EigenKind::Z)?;
    let (pair, trace) = track_z(&p, &p.start_eigenpair(), Direction::Forward, &cfg)?;
    write_trace(args.trace.as_deref(), &trace)?;
    Report::single("Z", &pair, tracked_stats(&trace)).to_json()
}

fn run_h(args: &SolveArgs) -> Result<String> {
    let a = read_tensor(&args.input)?;
    let cfg = args.tracker.config()?;
    let gen = match args.seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_generator(&mut rng, a.dim(), OddSearchConfig::default().norm_range)
        }
        None => uniform_h_generator(a.dim(), a.order()),
    };
    let p = HomotopyProblem::new(&a, gen, EigenKind::H)?;
    let (pair, trace) = track_h(&p, &cfg)?;
    write_trace(args.trace.as_deref(), &trace)?;
    Report::single("H", &pair, tracked_stats(&trace)).to_json()
}

fn run_zodd(args: &OddArgs) -> Result<String> {
    if args.threads == 0 {
        return Err(Error::InvalidInput("--threads must be at least 1".into()));
    }
    let a = read_tensor(&args.input)?;
    let cfg = OddSearchConfig { tracker: args.tracker.config()?, threads: args.threads, ..OddSearchConfig::default() };
    let set = find_odd_z(&a, args.k, args.seed, &cfg)?;
    if !set.skipped().is_empty() {
        eprintln!(
            "teneig: warning: {} branch(es) skipped; the set is only a lower bound and need not be odd",
            set.skipped().len()
        );
    }
    Report::from_set(&set).to_json()
}

fn run_gen(args: &GenArgs) -> Result<String> {
    let a = match &args.which {
        GenKind::Laplacian { m, n } => signless_laplacian(*m, *n)?,
        GenKind::ScaledLaplacian { w, m, n } => scaled_laplacian(*w, *m, *n)?,
        GenKind::Pagerank { alpha } => pagerank(*alpha)?,
        GenKind::ThreeEig => example_3eig(),
    };
    Ok(format_tensor(&a))
}

fn baseline_report(kind: &str, r: &IterationReport) -> Report {
    let stats = RunStats {
        evaluations: Some(r.evaluations),
        converged: Some(r.converged),
        iterations: Some(r.iterations),
        ..RunStats::default()
    };
    Report::single(kind, &r.pair, stats)
}

fn run_baseline(args: &BaselineArgs) -> Result<String> {
    let input = args.input.as_ref().ok_or_else(|| Error::InvalidInput("--input is required".into()))?;
    let a = read_tensor(input)?;
    if !(args.tol > 0.0) {
        return Err(Error::InvalidInput(format!("--tol must be positive, got {}", args.tol)));
    }
    let x0: Vec<f64> = match args.seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..a.dim()).map(|_| rng.gen_range(0.1..1.0)).collect()
        }
        None => vec![1.0; a.dim()],
    };
    let report = match args.method {
        BaselineMethod::Nqz => baseline_report("H", &nqz(&a, &x0, args.tol, args.max_eval)?),
        BaselineMethod::Sshopm { alpha } => baseline_report("Z", &sshopm(&a, alpha, &x0, args.tol, args.max_eval)?),
    };
    report.to_json()
}

/// Runs a parsed command, writing its result to `--output` or stdout.
pub fn run(cli: &Cli) -> Result<()> {
    let (text, output) = match &cli.command {
        Command::Z(args) => (run_z(args)?, args.output.as_deref()),
        Command::H(args) => (run_h(args)?, args.output.as_deref()),
        Command::Zodd(args) => (run_zodd(args)?, args.output.as_deref()),
        Command::Gen(args) => (run_gen(args)?, args.output.as_deref()),
        Command::Baseline(args) => (run_baseline(args)?, args.output.as_deref()),
    };
    emit(output, &text)
}

/// Entry point shared by the binary: parses arguments, runs, maps errors to
/// exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let category = e.category();
            eprintln!("teneig: {category:?}: {e}");
            exit_code(category)
        }
    }
}
