//! Command implementations behind the `mopf` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mopf::io::{self, ExportFormat, Meta, RunConfig, ToleranceOverrides};
use mopf::mdp::{gen_gridworld, gen_random_mdp};
use mopf::oracle::{brute_force_front_with, compare_fronts, verify_front_with, ComparisonReport};
use mopf::search::{search, ParetoFront, SearchConfig};
use mopf::tolerance::COMPARE_TOL;
use mopf::{Error, Mdp};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ABORTED: i32 = 3;
pub const EXIT_CAP: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "mopf", version, about = "Exact Pareto fronts of multi-objective MDPs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an MDP instance.
    Gen(GenArgs),
    /// Compute the Pareto front by vertex search.
    Solve(SolveArgs),
    /// Compute the Pareto front by enumerating every deterministic policy.
    Oracle(OracleArgs),
    /// Compare two fronts; exit 1 on mismatch.
    Compare(CompareArgs),
    /// Check sampled face points of a front against the MDP.
    Verify(VerifyArgs),
    /// Time both solvers over a suite of random instances.
    Bench(BenchArgs),
    /// Convert a front for plotting.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Random,
    Grid,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub kind: GenKind,
    #[arg(long, default_value_t = 5)]
    pub states: usize,
    #[arg(long, default_value_t = 3)]
    pub actions: usize,
    #[arg(long, default_value_t = 3)]
    pub rows: usize,
    #[arg(long, default_value_t = 3)]
    pub cols: usize,
    #[arg(long, default_value_t = 3)]
    pub objectives: usize,
    #[arg(long, default_value_t = 0.9)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    #[arg(long)]
    pub eps_geom: Option<f64>,
    #[arg(long)]
    pub eps_pos: Option<f64>,
    #[arg(long)]
    pub eps_equal: Option<f64>,
    #[arg(long)]
    pub rank_tol: Option<f64>,
}

impl TolArgs {
    fn overrides(&self) -> ToleranceOverrides {
        ToleranceOverrides {
            geom: self.eps_geom,
            pos: self.eps_pos,
            equal: self.eps_equal,
            rank: self.rank_tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "MOPF_THREADS")]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u64,
    #[arg(long, env = "MOPF_THREADS")]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub front_a: PathBuf,
    pub front_b: PathBuf,
    #[arg(long, default_value_t = COMPARE_TOL)]
    pub tol: f64,
    /// Print the full report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub mdp: PathBuf,
    #[arg(long)]
    pub front: PathBuf,
    #[arg(long, default_value_t = 25)]
    pub samples: usize,
    #[arg(long, default_value_t = COMPARE_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u64,
    #[arg(long, env = "MOPF_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Search,
    Oracle,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "5")]
    pub states: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "5,6,7")]
    pub actions: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub objectives: usize,
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0.9)]
    pub gamma: f64,
    #[arg(long, value_delimiter = ',', default_value = "search,oracle")]
    pub solvers: Vec<Solver>,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u64,
    #[arg(long, env = "MOPF_THREADS")]
    pub threads: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub front: PathBuf,
    #[arg(long, default_value = "json")]
    pub format: String,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidMdp(_) | Error::Dimension(_) | Error::Format(_) | Error::Json(_) | Error::InvalidArgument(_) => {
                EXIT_INVALID
            }
            Error::SearchAborted(_) | Error::Degenerate(_) | Error::NotAVertex(_) => EXIT_ABORTED,
            Error::CapExceeded { .. } | Error::CountOverflow { .. } => EXIT_CAP,
            Error::UnknownFace(_) | Error::Io(_) => EXIT_MISMATCH,
        };
        Self::new(code, e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::new(EXIT_MISMATCH, format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| io_err(path, e))
}

/// Reads and validates an MDP, reporting each violation on stderr.
pub fn load_mdp(path: &Path) -> CliResult<(Mdp, Vec<u8>)> {
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::new(EXIT_INVALID, e.to_string()))?;
    let mdp = io::mdp_from_json(text)?;
    let report = mdp.validate();
    if !report.is_ok() {
        for v in &report.violations {
            eprintln!("invalid: {} {:?}: {}", v.field, v.index, v.message);
        }
        return Err(CliError::new(
            EXIT_INVALID,
            format!("{} validation failures in {}", report.violations.len(), path.display()),
        ));
    }
    Ok((mdp, bytes))
}

pub fn load_front(path: &Path) -> CliResult<ParetoFront> {
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::new(EXIT_INVALID, e.to_string()))?;
    Ok(io::front_from_json(text)?)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::new(EXIT_INVALID, e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn config_value(config: &RunConfig) -> Option<serde_json::Value> {
    serde_json::to_value(config).ok()
}

pub fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    let (mdp, params) = match args.kind {
        GenKind::Random => (
            gen_random_mdp(args.seed, args.states, args.actions, args.objectives, args.gamma)?,
            serde_json::json!({
                "kind": "random",
                "states": args.states,
                "actions": args.actions,
                "objectives": args.objectives,
                "gamma": args.gamma,
                "seed": args.seed,
            }),
        ),
        GenKind::Grid => (
            gen_gridworld(args.seed, args.rows, args.cols, args.objectives, args.gamma)?,
            serde_json::json!({
                "kind": "grid",
                "rows": args.rows,
                "cols": args.cols,
                "objectives": args.objectives,
                "gamma": args.gamma,
                "seed": args.seed,
            }),
        ),
    };
    write_file(&args.output, &io::mdp_to_json(&mdp, Some(Meta::new(Some(params), None)))?)?;
    println!(
        "states={} actions={} objectives={}",
        mdp.num_states(),
        mdp.num_actions(),
        mdp.num_objectives()
    );
    Ok(())
}

fn report_front(front: &ParetoFront, seconds: f64) {
    println!(
        "vertices={} faces={} iterations={} policies_evaluated={} planner_calls={} time={seconds:.3}s",
        front.vertices.len(),
        front.faces.len(),
        front.stats.iterations,
        front.stats.policies_evaluated,
        front.stats.planner_calls
    );
    for w in &front.stats.degeneracy_warnings {
        eprintln!("warning: {w}");
    }
}

pub fn cmd_solve(args: &SolveArgs) -> CliResult<ParetoFront> {
    let (mdp, bytes) = load_mdp(&args.input)?;
    let run = RunConfig {
        seed: args.seed,
        tolerances: args.tol.overrides(),
        thread_count: args.threads,
        cap: None,
        input: Some(args.input.clone()),
        output: Some(args.output.clone()),
    };
    let config = SearchConfig {
        seed: args.seed,
        tolerances: run.tolerances.resolve(),
        parallel: true,
    };
    let start = Instant::now();
    let front = with_threads(args.threads, || search(&mdp, &config))??;
    let seconds = start.elapsed().as_secs_f64();
    let meta = Meta::new(config_value(&run), Some(&bytes));
    write_file(&args.output, &io::front_to_json(&front, "search", Some(meta))?)?;
    report_front(&front, seconds);
    Ok(front)
}

pub fn cmd_oracle(args: &OracleArgs) -> CliResult<ParetoFront> {
    let (mdp, bytes) = load_mdp(&args.input)?;
    let run = RunConfig {
        seed: 0,
        tolerances: args.tol.overrides(),
        thread_count: args.threads,
        cap: Some(args.cap),
        input: Some(args.input.clone()),
        output: Some(args.output.clone()),
    };
    let tol = run.tolerances.resolve();
    let start = Instant::now();
    let front = with_threads(args.threads, || brute_force_front_with(&mdp, args.cap as u128, &tol, true))??;
    let seconds = start.elapsed().as_secs_f64();
    let meta = Meta::new(config_value(&run), Some(&bytes));
    write_file(&args.output, &io::front_to_json(&front, "oracle", Some(meta))?)?;
    report_front(&front, seconds);
    Ok(front)
}

/// Returns the report; the caller maps a mismatch to exit 1.
pub fn cmd_compare(args: &CompareArgs) -> CliResult<ComparisonReport> {
    let a = load_front(&args.front_a)?;
    let b = load_front(&args.front_b)?;
    let report = compare_fronts(&a, &b, args.tol)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| CliError::new(EXIT_MISMATCH, e.to_string()))?
        );
    } else {
        println!(
            "vertex_match={} face_match={} matched={} unmatched_a={} unmatched_b={} faces_only_a={} faces_only_b={} max_vertex_distance={:e}",
            report.vertex_match,
            report.face_match,
            report.matching.len(),
            report.unmatched_a.len(),
            report.unmatched_b.len(),
            report.faces_only_a.len(),
            report.faces_only_b.len(),
            report.max_vertex_distance
        );
    }
    Ok(report)
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<mopf::oracle::VerificationReport> {
    let (mdp, _) = load_mdp(&args.mdp)?;
    let front = load_front(&args.front)?;
    if front.objectives != mdp.num_objectives() {
        return Err(CliError::new(EXIT_INVALID, "front and MDP have different objective counts"));
    }
    let report = with_threads(args.threads, || {
        verify_front_with(&mdp, &front, args.samples, args.cap as u128, args.tol)
    })??;
    println!(
        "faces={} samples={} failures={} max_affine_residual={:e}",
        report.faces_checked,
        report.samples,
        report.failures.len(),
        report.max_affine_residual
    );
    for f in &report.failures {
        eprintln!("face {}: {} (weights {:?})", f.face, f.reason, f.weights);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub states: usize,
    pub actions: usize,
    pub objectives: usize,
    pub seed: u64,
    pub solver: Solver,
    pub vertices: usize,
    pub faces: usize,
    pub policies_evaluated: usize,
    pub seconds: f64,
}

pub fn run_bench(args: &BenchArgs) -> CliResult<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &states in &args.states {
        for &actions in &args.actions {
            for seed in 0..args.seeds {
                let mdp = gen_random_mdp(seed, states, actions, args.objectives, args.gamma)?;
                for &solver in &args.solvers {
                    let start = Instant::now();
                    let front = with_threads(args.threads, || match solver {
                        Solver::Search => search(&mdp, &SearchConfig::default()),
                        Solver::Oracle => brute_force_front_with(&mdp, args.cap as u128, &Default::default(), true),
                    })??;
                    rows.push(BenchRow {
                        states,
                        actions,
                        objectives: args.objectives,
                        seed,
                        solver,
                        vertices: front.vertices.len(),
                        faces: front.faces.len(),
                        policies_evaluated: front.stats.policies_evaluated,
                        seconds: start.elapsed().as_secs_f64(),
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::new(EXIT_MISMATCH, e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::new(EXIT_MISMATCH, e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::new(EXIT_MISMATCH, e.to_string()))
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<Vec<BenchRow>> {
    let rows = run_bench(args)?;
    let text = bench_csv(&rows)?;
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(rows)
}

pub fn cmd_export(args: &ExportArgs) -> CliResult<()> {
    let front = load_front(&args.front)?;
    let format: ExportFormat = args.format.parse()?;
    write_file(&args.output, &io::export(&front, format)?)
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| EXIT_OK),
        Command::Solve(a) => cmd_solve(a).map(|_| EXIT_OK),
        Command::Oracle(a) => cmd_oracle(a).map(|_| EXIT_OK),
        Command::Compare(a) => cmd_compare(a).map(|r| if r.matches() { EXIT_OK } else { EXIT_MISMATCH }),
        Command::Verify(a) => cmd_verify(a).map(|r| if r.passed() { EXIT_OK } else { EXIT_MISMATCH }),
        Command::Bench(a) => cmd_bench(a).map(|_| EXIT_OK),
        Command::Export(a) => cmd_export(a).map(|_| EXIT_OK),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
