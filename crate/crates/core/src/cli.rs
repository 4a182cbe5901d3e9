//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a solver stops at its iteration budget,
//! 2 on configuration, parse or I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Result, SfpError};
use crate::harness::{run_benchmark, write_outputs, Algo, BenchConfig, BenchKind, SolverSettings};
use crate::inner::InnerSolver;
use crate::problem::{ProblemSpec, Status};
use crate::proxcheck::run_prox_check;
use crate::report::{summary_line, trace_csv, write_atomic};
use crate::textio::{read_matrix, read_vector, write_vector, SetSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MAX_ITER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sfp", version, about = "Split feasibility solvers with l1 - l2 regularization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem read from files.
    Solve(Box<SolveArgs>),
    /// Consistent random systems (C = nonnegative orthant, Q = {b}).
    BenchRandom(BenchArgs),
    /// Noisy sparse recovery.
    BenchSparse(BenchArgs),
    /// Compare the l1 - l2 prox with a brute-force grid minimum.
    ProxCheck(ProxCheckArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// dca, fb, mf, cq or mcq.
    #[arg(long)]
    algo: String,
    /// Matrix file.
    #[arg(long = "A", value_name = "FILE")]
    a: PathBuf,
    /// Target set, e.g. singleton:b.vec or ball:c.vec:0.1.
    #[arg(long = "Q", value_name = "SET")]
    q: String,
    /// Constraint set; defaults to fullspace.
    #[arg(long = "C", value_name = "SET")]
    c: Option<String>,
    /// l1 - l2 weight; required for dca, fb and mf.
    #[arg(long)]
    gamma: Option<f64>,
    /// Start point (vector file); defaults to 0.
    #[arg(long, value_name = "FILE")]
    x0: Option<PathBuf>,
    /// Trace CSV output.
    #[arg(long, value_name = "FILE", default_value = "trace.csv")]
    trace: PathBuf,
    /// Write the final iterate as a vector file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Outer iteration budget.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Stop when ‖x_{k+1} − x_k‖ falls to this value.
    #[arg(long)]
    step_tol: Option<f64>,

    /// [dca] fb-in-dr or dr-in-fb.
    #[arg(long, default_value = "dr-in-fb")]
    inner: String,
    /// [dca] Douglas-Rachford scale of fb-in-dr; defaults to gamma.
    #[arg(long)]
    kappa: Option<f64>,
    /// [dca] DR relaxation in (0, 2).
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// [dca] inner stopping tolerance.
    #[arg(long)]
    inner_tol: Option<f64>,
    /// [dca] inner iteration cap per outer step.
    #[arg(long, default_value_t = 10_000)]
    inner_max: usize,
    /// [dca] norm under which an iterate counts as zero.
    #[arg(long)]
    zero_tol: Option<f64>,

    /// [fb] step, must lie in (0, gamma/‖A‖²).
    #[arg(long)]
    fb_step: Option<f64>,

    /// [mf] shift mu >= 0; defaults to ‖A‖².
    #[arg(long)]
    mu: Option<f64>,
    /// [mf] right end of the line-search bracket.
    #[arg(long, default_value_t = 2.0)]
    lambda_max: f64,
    /// [mf] golden-section evaluations.
    #[arg(long, default_value_t = 40)]
    golden_evals: usize,
    /// [mf] stationarity threshold of the stopping test.
    #[arg(long)]
    stationarity_tol: Option<f64>,

    /// [cq] step; defaults to 1/‖A‖².
    #[arg(long)]
    cq_step: Option<f64>,

    /// [mcq] backtracking ratio l in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    l: f64,
    /// [mcq] Armijo constant in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    armijo: f64,
    /// [mcq] initial step scale.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// [mcq] l1 level t of c(x) = ‖x‖₁ − t.
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// key=value configuration file.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Overrides out_dir from the configuration.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// 120 x 512 with k = 50 (sparse benchmark only).
    #[arg(long)]
    large_scale: bool,
}

#[derive(Debug, Args)]
struct ProxCheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 400)]
    samples_2d: usize,
    #[arg(long, default_value_t = 100)]
    samples_3d: usize,
    #[arg(long, default_value_t = 1e-3)]
    grid_step: f64,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(&a, out),
        Command::BenchRandom(a) => bench(&a, BenchKind::Random, out),
        Command::BenchSparse(a) => bench(&a, BenchKind::Sparse, out),
        Command::ProxCheck(a) => prox_check(&a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

fn flag<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| SfpError::Config(format!("{name}: {e}")))
}

fn load_set(name: &str, spec: &str) -> Result<crate::sets::ClosedConvexSet> {
    flag(name, SetSpec::parse(spec).and_then(|s| s.resolve()))
}

fn solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let algo: Algo = flag("--algo", a.algo.parse())?;
    if algo.is_regularized() && a.gamma.is_none() {
        return Err(SfpError::Config(format!("--gamma is required for --algo {algo}")));
    }
    let inner: InnerSolver = flag("--inner", a.inner.parse())?;
    let matrix = flag("--A", read_matrix(&a.a))?;
    let q = load_set("--Q", &a.q)?;
    let c = match &a.c {
        Some(s) => load_set("--C", s)?,
        None => crate::sets::ClosedConvexSet::full_space(matrix.cols()),
    };
    // the unregularized methods never read gamma
    let gamma = a.gamma.unwrap_or(1.0);
    let problem = flag("problem", ProblemSpec::new(matrix, c, q, gamma))?;
    let x0 = match &a.x0 {
        Some(p) => flag("--x0", read_vector(p))?,
        None => vec![0.0; problem.n()],
    };
    if x0.len() != problem.n() {
        return Err(SfpError::Config(format!(
            "--x0: expected {} entries, found {}",
            problem.n(),
            x0.len()
        )));
    }
    let settings = settings_from(a, inner);
    let result = settings.run(algo, &problem, &x0)?;
    flag("--trace", write_atomic(&a.trace, &trace_csv(&result)))?;
    if let Some(path) = &a.out {
        flag("--out", write_atomic(path, &write_vector(&result.x)))?;
    }
    writeln!(out, "{}", summary_line(&result))?;
    Ok(match result.status {
        Status::MaxIterations => EXIT_MAX_ITER,
        Status::Converged | Status::ZeroStationary => EXIT_OK,
    })
}

fn settings_from(a: &SolveArgs, inner: InnerSolver) -> SolverSettings {
    let mut s = SolverSettings::default();
    s.dca.inner_solver = inner;
    s.dca.inner_opts.kappa = a.kappa;
    s.dca.inner_opts.tau = a.tau;
    s.dca.inner_tol = a.inner_tol;
    s.dca.inner_max = a.inner_max;
    s.dca.zero_tol = a.zero_tol;
    s.fb_step = a.fb_step;
    s.mf.mu_shift = a.mu;
    s.mf.lambda_max = a.lambda_max;
    s.mf.golden_evals = a.golden_evals;
    s.mf.stationarity_tol = a.stationarity_tol;
    s.cq.step = a.cq_step;
    s.mcq.l = a.l;
    s.mcq.mu = a.armijo;
    s.mcq.sigma = a.sigma;
    s.mcq.t = a.t;
    if let Some(m) = a.max_iter {
        s.dca.max_outer = m;
        s.mf.max_iter = m;
        s.cq.max_iter = m;
        s.mcq.max_iter = m;
        s.fb_max_iter = Some(m);
    }
    if let Some(t) = a.step_tol {
        s.dca.step_tol = t;
        s.mf.step_tol = t;
        s.cq.step_tol = t;
        s.mcq.step_tol = t;
        s.fb_step_tol = Some(t);
    }
    s
}

fn bench(a: &BenchArgs, kind: BenchKind, out: &mut dyn Write) -> Result<i32> {
    let text = flag("--config", std::fs::read_to_string(&a.config).map_err(SfpError::from))?;
    let mut cfg = flag("--config", BenchConfig::parse(&text))?;
    if a.large_scale {
        if kind != BenchKind::Sparse {
            return Err(SfpError::Config("--large-scale applies to bench-sparse only".into()));
        }
        cfg = cfg.with_large_scale();
    }
    let dir: &Path = a.out_dir.as_deref().unwrap_or(&cfg.out_dir);
    let rows = run_benchmark(&cfg, kind)?;
    write_outputs(&cfg, &rows, dir)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    writeln!(
        out,
        "rows={} failed={} out_dir={}",
        rows.len(),
        failed,
        dir.display()
    )?;
    Ok(EXIT_OK)
}

fn prox_check(a: &ProxCheckArgs, out: &mut dyn Write) -> Result<i32> {
    if !(a.grid_step > 0.0) || !a.grid_step.is_finite() {
        return Err(SfpError::Config("--grid-step must be > 0".into()));
    }
    let r = run_prox_check(a.seed, a.samples_2d, a.samples_3d, a.grid_step);
    writeln!(
        out,
        "samples={} max_gap={:e} max_excess={:e} worst_lambda={} regimes={}/{}/{}",
        r.samples,
        r.max_gap,
        r.max_excess,
        r.worst_lambda,
        r.regime_counts[0],
        r.regime_counts[1],
        r.regime_counts[2]
    )?;
    Ok(EXIT_OK)
}
