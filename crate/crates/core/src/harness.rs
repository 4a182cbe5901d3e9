//! Problem generators, recovery metrics and the two benchmark experiments:
//! consistent random systems and noisy sparse recovery.
//!
//! All randomness comes from a ChaCha8 stream keyed by `(seed, trial)`, so a
//! trial can be regenerated in isolation and trials can run in parallel.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::baselines::{solve_cq, solve_mcq, CqOptions, McqOptions};
use crate::dca::{solve_dca, DcaOptions};
use crate::error::{Result, SfpError};
use crate::fbsplit::{solve_fb, FbOptions};
use crate::linops::{dist, norm1, norm2, norm_inf, DenseMatrix};
use crate::minefuku::{solve_mf, MfOptions};
use crate::problem::{ProblemSpec, SolveResult, Status};
use crate::report::{trace_csv, write_atomic};
use crate::sets::ClosedConvexSet;

/// Quantile levels of the per-iteration summaries (quintiles plus median).
pub const QUANTILE_LEVELS: [f64; 7] = [0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0];

pub const SUMMARY_HEADER: &str = "trial,algo,status,iterations,final_objective,final_fidelity,rel_l2_error,support_precision,support_recall,wall_ms";

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Result<DenseMatrix> {
    let values = (0..m * n).map(|_| StandardNormal.sample(&mut *rng)).collect();
    DenseMatrix::new(m, n, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    /// l1 − l2 weight handed to the regularized solvers.
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSpec {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub noise_variance: f64,
    pub gamma: f64,
}

impl SparseSpec {
    /// 120 × 512 with 50 nonzeros and γ = 0.6.
    pub fn large_scale(seed: u64) -> Self {
        Self {
            seed,
            m: 120,
            n: 512,
            k: 50,
            noise_variance: 1e-4,
            gamma: 0.6,
        }
    }
}

/// A generated problem together with its planted solution.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: ProblemSpec,
    pub x_true: Vec<f64>,
    pub x0: Vec<f64>,
    /// l1 level offered to the modified CQ method.
    pub t: f64,
}

/// Consistent system `Ax = b` with Gaussian `A`, `x_true ≥ 0` (absolute
/// values of Gaussians), `C = ℝⁿ₊`, `Q = {b}` and `x0 = 0`.
pub fn gen_random_problem(spec: &RandomSpec, trial: usize) -> Result<Instance> {
    if spec.m == 0 || spec.n == 0 || spec.trials == 0 {
        return Err(SfpError::Config("m, n and trials must be >= 1".into()));
    }
    if trial >= spec.trials {
        return Err(SfpError::InvalidArgument(format!(
            "trial {trial} out of range (trials = {})",
            spec.trials
        )));
    }
    let mut rng = trial_rng(spec.seed, trial);
    let a = gaussian_matrix(&mut rng, spec.m, spec.n)?;
    let x_true: Vec<f64> = (0..spec.n)
        .map(|_| StandardNormal.sample(&mut rng))
        .map(|v: f64| v.abs())
        .collect();
    let b = a.apply(&x_true)?;
    let t = norm1(&x_true);
    let problem = ProblemSpec::new(
        a,
        ClosedConvexSet::nonnegative_orthant(spec.n),
        ClosedConvexSet::singleton(b)?,
        spec.gamma,
    )?;
    Ok(Instance {
        problem,
        x0: vec![0.0; spec.n],
        x_true,
        t: t.max(f64::MIN_POSITIVE),
    })
}

/// Noisy sparse recovery: `k` entries of `±1` at uniformly drawn positions,
/// `b = A·x_true + ε` with `ε ~ N(0, noise_variance)`, `C = ℝⁿ`, `Q = {b}`.
pub fn gen_sparse_recovery(spec: &SparseSpec, trial: usize) -> Result<Instance> {
    if spec.m == 0 || spec.n == 0 {
        return Err(SfpError::Config("m and n must be >= 1".into()));
    }
    if spec.k > spec.n {
        return Err(SfpError::Config(format!("sparsity k = {} exceeds n = {}", spec.k, spec.n)));
    }
    if !(spec.noise_variance >= 0.0) {
        return Err(SfpError::Config("noise_variance must be >= 0".into()));
    }
    let mut rng = trial_rng(spec.seed, trial);
    let a = gaussian_matrix(&mut rng, spec.m, spec.n)?;
    let mut positions = sample(&mut rng, spec.n, spec.k).into_vec();
    positions.sort_unstable();
    let mut x_true = vec![0.0; spec.n];
    for i in positions {
        x_true[i] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    }
    let sd = spec.noise_variance.sqrt();
    let mut b = a.apply(&x_true)?;
    for bi in &mut b {
        let e: f64 = StandardNormal.sample(&mut rng);
        *bi += sd * e;
    }
    let t = norm1(&x_true);
    let problem = ProblemSpec::new(
        a,
        ClosedConvexSet::full_space(spec.n),
        ClosedConvexSet::singleton(b)?,
        spec.gamma,
    )?;
    Ok(Instance {
        problem,
        x0: vec![0.0; spec.n],
        x_true,
        t: if t > 0.0 { t } else { 1.0 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryMetrics {
    pub rel_l2_error: f64,
    pub support_precision: f64,
    pub support_recall: f64,
}

/// Relative error and support agreement, with support `|xᵢ| > 1e-4·‖x*‖∞`.
/// For `x* = 0` the error is the absolute `‖x̂‖₂`.
pub fn recovery_metrics(x_hat: &[f64], x_true: &[f64]) -> RecoveryMetrics {
    let nt = norm2(x_true);
    let rel_l2_error = if nt > 0.0 {
        dist(x_hat, x_true) / nt
    } else {
        norm2(x_hat)
    };
    let thr = 1e-4 * norm_inf(x_true);
    let est: Vec<bool> = x_hat.iter().map(|v| v.abs() > thr).collect();
    let truth: Vec<bool> = x_true.iter().map(|v| v.abs() > thr).collect();
    let hits = est.iter().zip(&truth).filter(|(e, t)| **e && **t).count() as f64;
    let n_est = est.iter().filter(|e| **e).count() as f64;
    let n_true = truth.iter().filter(|t| **t).count() as f64;
    RecoveryMetrics {
        rel_l2_error,
        support_precision: if n_est > 0.0 { hits / n_est } else { 1.0 },
        support_recall: if n_true > 0.0 { hits / n_true } else { 1.0 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    Dca,
    Fb,
    Mf,
    Cq,
    Mcq,
}

impl Algo {
    pub const ALL: [Algo; 5] = [Algo::Dca, Algo::Fb, Algo::Mf, Algo::Cq, Algo::Mcq];

    /// Whether the method uses the l1 − l2 weight `γ`.
    pub fn is_regularized(self) -> bool {
        matches!(self, Algo::Dca | Algo::Fb | Algo::Mf)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Dca => "dca",
            Algo::Fb => "fb",
            Algo::Mf => "mf",
            Algo::Cq => "cq",
            Algo::Mcq => "mcq",
        })
    }
}

impl FromStr for Algo {
    type Err = SfpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dca" => Ok(Algo::Dca),
            "fb" => Ok(Algo::Fb),
            "mf" => Ok(Algo::Mf),
            "cq" => Ok(Algo::Cq),
            "mcq" => Ok(Algo::Mcq),
            other => Err(SfpError::Config(format!(
                "unknown algorithm '{other}' (expected dca, fb, mf, cq or mcq)"
            ))),
        }
    }
}

/// Options for every solver, used by the benchmark runner and the CLI.
#[derive(Debug, Clone, Default)]
pub struct SolverSettings {
    pub dca: DcaOptions,
    pub mf: MfOptions,
    pub cq: CqOptions,
    pub mcq: McqOptions,
    /// Forward-backward step; `None` means `0.9·γ/‖A‖²`.
    pub fb_step: Option<f64>,
    pub fb_max_iter: Option<usize>,
    pub fb_step_tol: Option<f64>,
}

impl SolverSettings {
    pub fn run(&self, algo: Algo, p: &ProblemSpec, x0: &[f64]) -> Result<SolveResult> {
        match algo {
            Algo::Dca => solve_dca(p, x0, &self.dca),
            Algo::Fb => {
                let mut opts = match self.fb_step {
                    Some(s) => FbOptions::with_step(p, s)?,
                    None => FbOptions::for_problem(p),
                };
                if let Some(m) = self.fb_max_iter {
                    opts.max_iter = m;
                }
                if let Some(t) = self.fb_step_tol {
                    opts.step_tol = t;
                }
                solve_fb(p, x0, &opts)
            }
            Algo::Mf => solve_mf(p, x0, &self.mf),
            Algo::Cq => solve_cq(p, x0, &self.cq),
            Algo::Mcq => solve_mcq(p, x0, &self.mcq),
        }
    }
}

/// Which experiment a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchKind {
    Random,
    Sparse,
}

/// Flat `key = value` benchmark configuration. Blank lines and `#` comments
/// are ignored; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub gamma: f64,
    pub noise_variance: f64,
    pub algos: Vec<Algo>,
    pub out_dir: PathBuf,
    /// Emit `trace_<algo>_<trial>.csv` files.
    pub traces: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            m: 100,
            n: 256,
            k: 10,
            trials: 20,
            gamma: 0.6,
            noise_variance: 1e-4,
            algos: Algo::ALL.to_vec(),
            out_dir: PathBuf::from("bench_out"),
            traces: false,
        }
    }
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = BenchConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SfpError::parse(line_no, format!("expected key=value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| SfpError::parse(line_no, format!("invalid {what} for '{key}': '{value}'"));
            match key {
                "seed" => cfg.seed = value.parse().map_err(|_| bad("integer"))?,
                "m" => cfg.m = value.parse().map_err(|_| bad("integer"))?,
                "n" => cfg.n = value.parse().map_err(|_| bad("integer"))?,
                "k" => cfg.k = value.parse().map_err(|_| bad("integer"))?,
                "trials" => cfg.trials = value.parse().map_err(|_| bad("integer"))?,
                "gamma" => cfg.gamma = value.parse().map_err(|_| bad("number"))?,
                "noise_variance" => cfg.noise_variance = value.parse().map_err(|_| bad("number"))?,
                "algos" => {
                    cfg.algos = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| s.parse::<Algo>().map_err(|e| SfpError::parse(line_no, e.to_string())))
                        .collect::<Result<_>>()?;
                }
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "traces" => cfg.traces = value.parse().map_err(|_| bad("boolean"))?,
                other => return Err(SfpError::parse(line_no, format!("unknown key '{other}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.trials == 0 {
            return Err(SfpError::Config("m, n and trials must be >= 1".into()));
        }
        if self.k > self.n {
            return Err(SfpError::Config(format!("k = {} exceeds n = {}", self.k, self.n)));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(SfpError::Config(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.noise_variance >= 0.0) || !self.noise_variance.is_finite() {
            return Err(SfpError::Config("noise_variance must be >= 0".into()));
        }
        if self.algos.is_empty() {
            return Err(SfpError::Config("algos must name at least one algorithm".into()));
        }
        let mut seen = self.algos.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algos.len() {
            return Err(SfpError::Config("algos lists an algorithm twice".into()));
        }
        Ok(())
    }

    /// Overrides the dimensions with the 120 × 512, k = 50 setting.
    pub fn with_large_scale(mut self) -> Self {
        let p = SparseSpec::large_scale(self.seed);
        self.m = p.m;
        self.n = p.n;
        self.k = p.k;
        self
    }

    fn instance(&self, kind: BenchKind, trial: usize) -> Result<Instance> {
        match kind {
            BenchKind::Random => gen_random_problem(
                &RandomSpec {
                    seed: self.seed,
                    m: self.m,
                    n: self.n,
                    trials: self.trials,
                    gamma: self.gamma,
                },
                trial,
            ),
            BenchKind::Sparse => gen_sparse_recovery(
                &SparseSpec {
                    seed: self.seed,
                    m: self.m,
                    n: self.n,
                    k: self.k,
                    noise_variance: self.noise_variance,
                    gamma: self.gamma,
                },
                trial,
            ),
        }
    }
}

/// One trial × algorithm outcome.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub trial: usize,
    pub algo: Algo,
    /// `None` when the solver returned an error; `error` then holds it.
    pub status: Option<Status>,
    pub iterations: usize,
    /// `Γ` of the problem the method was run on (with the configured `γ`).
    pub final_objective: f64,
    pub final_fidelity: f64,
    pub metrics: RecoveryMetrics,
    pub wall_ms: f64,
    pub result: Option<SolveResult>,
    pub error: Option<String>,
}

/// Adapts an experiment's problem to a method's requirements: forward-backward
/// needs `C = ℝⁿ`, the modified CQ method works on `{‖x‖₁ ≤ t}` (expressed as
/// `C = ℝⁿ` plus the level `t`).
pub fn problem_for(algo: Algo, instance: &Instance) -> Result<ProblemSpec> {
    let p = &instance.problem;
    match algo {
        Algo::Fb | Algo::Mcq if !matches!(p.c(), ClosedConvexSet::FullSpace(_)) => {
            p.with_constraint(ClosedConvexSet::full_space(p.n()))
        }
        _ => Ok(p.clone()),
    }
}

fn run_one(cfg: &BenchConfig, kind: BenchKind, trial: usize, algo: Algo) -> BenchRow {
    let start = Instant::now();
    let outcome = cfg.instance(kind, trial).and_then(|inst| {
        let p = problem_for(algo, &inst)?;
        let mut settings = SolverSettings::default();
        settings.mcq.t = Some(inst.t);
        let r = settings.run(algo, &p, &inst.x0)?;
        Ok((inst, p, r))
    });
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok((inst, p, r)) => BenchRow {
            trial,
            algo,
            status: Some(r.status),
            iterations: r.iterations(),
            final_objective: p.gamma_objective(&r.x),
            final_fidelity: p.fidelity(&r.x),
            metrics: recovery_metrics(&r.x, &inst.x_true),
            wall_ms,
            result: Some(r),
            error: None,
        },
        Err(e) => BenchRow {
            trial,
            algo,
            status: None,
            iterations: 0,
            final_objective: f64::NAN,
            final_fidelity: f64::NAN,
            metrics: RecoveryMetrics {
                rel_l2_error: f64::NAN,
                support_precision: f64::NAN,
                support_recall: f64::NAN,
            },
            wall_ms,
            result: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every (trial, algorithm) pair, in parallel across pairs. Rows come
/// back sorted by trial, then by the order of `cfg.algos`.
pub fn run_benchmark(cfg: &BenchConfig, kind: BenchKind) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    let jobs: Vec<(usize, Algo)> = (0..cfg.trials)
        .flat_map(|t| cfg.algos.iter().map(move |a| (t, *a)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(trial, algo)| run_one(cfg, kind, trial, algo))
        .collect())
}

/// Linear-interpolation quantile (type 7) of unsorted data.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Per-iteration quantiles of the fidelity and of the trace objective across
/// trials; runs that stopped early carry their last value forward.
pub fn quantile_table(rows: &[&BenchRow]) -> String {
    let traces: Vec<&SolveResult> = rows.iter().filter_map(|r| r.result.as_ref()).collect();
    let len = traces.iter().map(|r| r.trace.len()).max().unwrap_or(0);
    let mut out = String::from("iter");
    for prefix in ["fidelity", "objective"] {
        for q in QUANTILE_LEVELS {
            let _ = write!(out, ",{prefix}_q{}", (q * 100.0).round() as u32);
        }
    }
    out.push('\n');
    for i in 0..len {
        let _ = write!(out, "{i}");
        for pick in [0, 1] {
            let column: Vec<f64> = traces
                .iter()
                .filter_map(|r| r.trace.get(i).or(r.trace.last()))
                .map(|row| if pick == 0 { row.fidelity } else { row.objective })
                .collect();
            for q in QUANTILE_LEVELS {
                let _ = write!(out, ",{}", quantile(&column, q));
            }
        }
        out.push('\n');
    }
    out
}

pub fn summary_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let status = match (&r.status, &r.error) {
            (Some(s), _) => s.to_string(),
            (None, _) => "error".to_string(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:.3}",
            r.trial,
            r.algo,
            status,
            r.iterations,
            r.final_objective,
            r.final_fidelity,
            r.metrics.rel_l2_error,
            r.metrics.support_precision,
            r.metrics.support_recall,
            r.wall_ms
        );
    }
    out
}

/// Writes `summary.csv`, `quantiles_<algo>.csv` and, when enabled,
/// `trace_<algo>_<trial>.csv` under `out_dir`.
pub fn write_outputs(cfg: &BenchConfig, rows: &[BenchRow], out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    write_atomic(&out_dir.join("summary.csv"), &summary_csv(rows))?;
    for algo in &cfg.algos {
        let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.algo == *algo).collect();
        write_atomic(&out_dir.join(format!("quantiles_{algo}.csv")), &quantile_table(&mine))?;
        if cfg.traces {
            for r in mine {
                if let Some(res) = &r.result {
                    write_atomic(&out_dir.join(format!("trace_{}_{}.csv", algo, r.trial)), &trace_csv(res))?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_sparse() -> SparseSpec {
        SparseSpec {
            seed: 7,
            m: 20,
            n: 40,
            k: 3,
            noise_variance: 1e-4,
            gamma: 0.6,
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let spec = RandomSpec {
            seed: 42,
            m: 5,
            n: 8,
            trials: 3,
            gamma: 0.6,
        };
        let a = gen_random_problem(&spec, 1).unwrap();
        let b = gen_random_problem(&spec, 1).unwrap();
        let c = gen_random_problem(&spec, 2).unwrap();
        assert_eq!(a.problem.a(), b.problem.a());
        assert_eq!(a.problem.q(), b.problem.q());
        assert_ne!(a.problem.a(), c.problem.a());
        let s1 = gen_sparse_recovery(&small_sparse(), 4).unwrap();
        let s2 = gen_sparse_recovery(&small_sparse(), 4).unwrap();
        assert_eq!(s1.x_true, s2.x_true);
        assert_eq!(s1.problem.q(), s2.problem.q());
    }

    #[test]
    fn random_problem_is_consistent_and_bounds_checked() {
        let spec = RandomSpec {
            seed: 1,
            m: 6,
            n: 10,
            trials: 2,
            gamma: 0.6,
        };
        let inst = gen_random_problem(&spec, 0).unwrap();
        assert!(inst.problem.fidelity(&inst.x_true) <= 1e-20);
        assert!(inst.problem.c().is_member(&inst.x_true, 0.0));
        assert!(gen_random_problem(&spec, 2).is_err());
    }

    #[test]
    fn sparse_generator_shapes() {
        let zero = SparseSpec {
            k: 0,
            noise_variance: 0.0,
            ..small_sparse()
        };
        let inst = gen_sparse_recovery(&zero, 0).unwrap();
        assert!(inst.x_true.iter().all(|v| *v == 0.0));
        match inst.problem.q() {
            ClosedConvexSet::Singleton(b) => assert!(b.iter().all(|v| *v == 0.0)),
            other => panic!("unexpected Q {other:?}"),
        }
        let inst = gen_sparse_recovery(&small_sparse(), 0).unwrap();
        assert_eq!(inst.x_true.iter().filter(|v| **v != 0.0).count(), 3);
        assert!(inst.x_true.iter().all(|v| v.abs() == 1.0 || *v == 0.0));
        assert_eq!(inst.t, 3.0);
        let large = SparseSpec::large_scale(0);
        assert_eq!((large.m, large.n, large.k, large.gamma), (120, 512, 50, 0.6));
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = trial_rng(3, 0);
        let (m, n) = (100, 200);
        let a = gaussian_matrix(&mut rng, m, n).unwrap();
        let len = (m * n) as f64;
        let mean = a.values().iter().sum::<f64>() / len;
        let var = a.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / len;
        assert!(mean.abs() <= 5.0 / len.sqrt());
        assert!((var - 1.0).abs() <= 0.1);
    }

    #[test]
    fn metrics_examples() {
        let truth = [1.0, 0.0, -1.0, 0.0];
        let m = recovery_metrics(&truth, &truth);
        assert_eq!(m.rel_l2_error, 0.0);
        assert_eq!((m.support_precision, m.support_recall), (1.0, 1.0));
        let m = recovery_metrics(&[1.0, 0.5, 0.0, 0.0], &truth);
        assert_eq!((m.support_precision, m.support_recall), (0.5, 0.5));
        assert!((m.rel_l2_error - (1.25f64).sqrt() / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn quantiles_and_median() {
        let v: Vec<f64> = (1..=50).map(|i| i as f64).collect();
        assert_eq!(median(&v), 25.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 50.0);
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.25), 1.25);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn config_parsing() {
        let cfg = BenchConfig::parse(
            "# sparse run\nseed = 5\nm=30\nn=60\nk=4\ntrials=2\ngamma=0.5\nnoise_variance=0\nalgos=dca, cq\nout_dir=/tmp/x\ntraces=true\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.algos, vec![Algo::Dca, Algo::Cq]);
        assert!(cfg.traces);
        assert!(BenchConfig::parse("bogus=1").is_err());
        assert!(BenchConfig::parse("m").is_err());
        assert!(BenchConfig::parse("algos=dca,sgd").is_err());
        assert!(BenchConfig::parse("k=500\nn=10").is_err());
        assert!(BenchConfig::parse("algos=dca,dca").is_err());
        assert_eq!(BenchConfig::parse("").unwrap(), BenchConfig::default());
    }

    #[test]
    fn benchmark_rows_and_outputs() {
        let cfg = BenchConfig {
            m: 15,
            n: 30,
            k: 2,
            trials: 2,
            algos: vec![Algo::Cq, Algo::Dca],
            traces: true,
            ..BenchConfig::default()
        };
        let rows = run_benchmark(&cfg, BenchKind::Sparse).unwrap();
        assert_eq!(rows.len(), 4);
        let order: Vec<(usize, Algo)> = rows.iter().map(|r| (r.trial, r.algo)).collect();
        assert_eq!(order, vec![(0, Algo::Cq), (0, Algo::Dca), (1, Algo::Cq), (1, Algo::Dca)]);
        let dir = tempfile::tempdir().unwrap();
        write_outputs(&cfg, &rows, dir.path()).unwrap();
        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 5);
        assert!(summary.starts_with(SUMMARY_HEADER));
        assert!(dir.path().join("trace_dca_1.csv").exists());
        assert!(dir.path().join("quantiles_cq.csv").exists());

        let one = BenchConfig {
            trials: 1,
            algos: vec![Algo::Mf],
            ..cfg.clone()
        };
        assert_eq!(run_benchmark(&one, BenchKind::Random).unwrap().len(), 1);
    }
}
