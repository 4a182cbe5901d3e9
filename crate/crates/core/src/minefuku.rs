//! Mine-Fukushima iteration: a convex direction subproblem followed by a line
//! search along the segment towards its solution.
//!
//! With `f(x) = ½‖(I − P_Q)Ax‖² − γ‖x‖₂` and `g = γ‖·‖₁ + i_C`, the shifted
//! split `f − μ‖·‖²/2`, `g + μ‖·‖²/2` makes the direction subproblem
//!
//! ```text
//! min_{x ∈ C} ⟨x, w⟩ + γ‖x‖₁ + (μ/2)‖x‖²,    w = ∇f(x_k) − μx_k
//! ```
//!
//! strongly convex for every `μ > 0`. Its solution is a proximal-gradient
//! step from `x_k` with step `1/μ`.

use crate::error::{Result, SfpError};
use crate::inner::dr_constrained_shrink;
use crate::linops::{dist, norm2};
use crate::problem::{feasible_start, ProblemSpec, SolveResult, Status, TraceRecorder};
use crate::prox::shrink_scalar;
use crate::sets::ClosedConvexSet;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct MfOptions {
    /// Shift `μ ≥ 0`; `None` means `‖A‖²`.
    pub mu_shift: Option<f64>,
    pub lambda_max: f64,
    /// Objective evaluations spent by the golden-section search.
    pub golden_evals: usize,
    pub max_iter: usize,
    pub step_tol: f64,
    /// Threshold on the stationarity residual; `None` means
    /// `max(μ, 1)·step_tol`.
    pub stationarity_tol: Option<f64>,
    /// Accuracy of the iterative direction solver used for non-separable `C`.
    pub subproblem_tol: f64,
}

impl Default for MfOptions {
    fn default() -> Self {
        Self {
            mu_shift: None,
            lambda_max: 2.0,
            golden_evals: 40,
            max_iter: 1000,
            step_tol: 1e-5,
            stationarity_tol: None,
            subproblem_tol: 1e-8,
        }
    }
}

impl MfOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(mu) = self.mu_shift {
            if !(mu >= 0.0) || !mu.is_finite() {
                return Err(SfpError::Config(format!("mu shift must be >= 0, got {mu}")));
            }
        }
        if !(self.lambda_max > 0.0) || !self.lambda_max.is_finite() {
            return Err(SfpError::Config(format!("lambda_max must be > 0, got {}", self.lambda_max)));
        }
        if self.golden_evals < 2 || self.max_iter == 0 {
            return Err(SfpError::Config("golden_evals must be >= 2 and max_iter > 0".into()));
        }
        if !(self.step_tol > 0.0) || !(self.subproblem_tol > 0.0) {
            return Err(SfpError::Config("tolerances must be > 0".into()));
        }
        if let Some(t) = self.stationarity_tol {
            if !(t > 0.0) {
                return Err(SfpError::Config(format!("stationarity_tol must be > 0, got {t}")));
            }
        }
        Ok(())
    }

    /// `μ` in effect for `p`.
    pub fn mu_for(&self, p: &ProblemSpec) -> f64 {
        self.mu_shift.unwrap_or_else(|| p.a().step_norm().powi(2))
    }

    pub fn stationarity_tol_for(&self, p: &ProblemSpec) -> f64 {
        self.stationarity_tol
            .unwrap_or_else(|| self.mu_for(p).max(1.0) * self.step_tol)
    }
}

/// `∇f(x) = Aᵗ(I − P_Q)Ax − γx/‖x‖₂`, with `0` as the `‖·‖₂` subgradient at the
/// origin.
pub fn smooth_gradient(p: &ProblemSpec, x: &[f64]) -> Vec<f64> {
    let mut g = p.fidelity_gradient(x);
    let nx = norm2(x);
    if nx > 0.0 {
        g.iter_mut()
            .zip(x)
            .for_each(|(gi, xi)| *gi -= p.gamma() * xi / nx);
    }
    g
}

/// Solves the direction subproblem at `x_k`.
pub fn mf_direction(p: &ProblemSpec, x_k: &[f64], opts: &MfOptions) -> Result<Vec<f64>> {
    opts.validate()?;
    p.check_point(x_k)?;
    let mu = opts.mu_for(p);
    let w: Vec<f64> = smooth_gradient(p, x_k)
        .iter()
        .zip(x_k)
        .map(|(g, x)| g - mu * x)
        .collect();
    solve_direction(p.c(), &w, p.gamma(), mu, opts.subproblem_tol)
}

/// `argmin_{x ∈ C} ⟨x, w⟩ + γ‖x‖₁ + (μ/2)‖x‖²`.
pub fn solve_direction(c: &ClosedConvexSet, w: &[f64], gamma: f64, mu: f64, tol: f64) -> Result<Vec<f64>> {
    if w.len() != c.dim() {
        return Err(SfpError::dim("direction coefficient", c.dim(), w.len()));
    }
    if mu == 0.0 && !c.is_bounded() {
        return Err(SfpError::Config(
            "mu = 0 needs a bounded constraint set (ball, box or l1ball); \
             the direction subproblem is unbounded below otherwise"
                .into(),
        ));
    }
    if c.is_separable() {
        return Ok((0..w.len())
            .map(|i| {
                let (lo, hi) = c.interval(i).unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
                if mu > 0.0 {
                    shrink_scalar(-w[i] / mu, gamma / mu).clamp(lo, hi)
                } else {
                    linear_l1_on_interval(w[i], gamma, lo, hi)
                }
            })
            .collect());
    }
    Ok(iterative_direction(c, w, gamma, mu, tol))
}

/// Minimizer of `w·x + γ|x|` over a bounded interval, preferring the
/// candidate of smallest magnitude on ties.
fn linear_l1_on_interval(w: f64, gamma: f64, lo: f64, hi: f64) -> f64 {
    let f = |x: f64| w * x + gamma * x.abs();
    let mut best = if lo <= 0.0 && 0.0 <= hi { 0.0 } else if lo > 0.0 { lo } else { hi };
    for cand in [lo, hi] {
        if f(cand) < f(best) {
            best = cand;
        }
    }
    best
}

/// Projected proximal gradient for non-separable `C`, with the prox of
/// `tγ‖·‖₁ + i_C` evaluated by Douglas-Rachford.
fn iterative_direction(c: &ClosedConvexSet, w: &[f64], gamma: f64, mu: f64, tol: f64) -> Vec<f64> {
    const MAX_STEPS: usize = 10_000;
    const DR_BUDGET: usize = 2_000;
    if mu > 0.0 {
        // One exact prox: the smooth part is (μ/2)‖x + w/μ‖² up to a constant.
        let target: Vec<f64> = w.iter().map(|wi| -wi / mu).collect();
        let (x, _) = dr_constrained_shrink(c, &target, gamma / mu, 1.0, DR_BUDGET * 10, 1e-14);
        return c.project_unchecked(&x);
    }
    let t = 1.0 / (1.0 + norm2(w));
    let mut x = c.project_unchecked(&vec![0.0; w.len()]);
    for _ in 0..MAX_STEPS {
        let forward: Vec<f64> = x.iter().zip(w).map(|(xi, wi)| xi - t * wi).collect();
        let (next, _) = dr_constrained_shrink(c, &forward, t * gamma, 1.0, DR_BUDGET, 1e-14);
        let moved = dist(&next, &x);
        x = next;
        if moved <= tol {
            break;
        }
    }
    c.project_unchecked(&x)
}

fn along(x_k: &[f64], x_tilde: &[f64], lambda: f64) -> Vec<f64> {
    x_k.iter()
        .zip(x_tilde)
        .map(|(a, b)| a + lambda * (b - a))
        .collect()
}

/// Approximate minimizer of `φ(λ) = Γ((1 − λ)x_k + λx̃)` over `[0, λ_max]`.
///
/// Golden-section search, then the endpoints and `λ = 1` are compared
/// explicitly; ties resolve towards `λ = 0`.
pub fn mf_line_search(p: &ProblemSpec, x_k: &[f64], x_tilde: &[f64], opts: &MfOptions) -> Result<f64> {
    opts.validate()?;
    p.check_point(x_k)?;
    p.check_point(x_tilde)?;
    let phi = |lambda: f64| p.gamma_objective(&along(x_k, x_tilde, lambda));
    Ok(golden_min(phi, opts.lambda_max, opts.golden_evals).0)
}

fn golden_min(phi: impl Fn(f64) -> f64, lambda_max: f64, evals: usize) -> (f64, f64) {
    let (mut a, mut b) = (0.0, lambda_max);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 2..evals {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = phi(d);
        }
    }
    let interior = if fc <= fd { (c, fc) } else { (d, fd) };
    let mut best = (0.0, phi(0.0));
    let one = 1.0_f64.min(lambda_max);
    for cand in [(one, phi(one)), (lambda_max, phi(lambda_max)), interior] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

/// Runs the iteration from `x0`: stationarity test, direction, line search,
/// update. The trace objective is `Γ` and starts with `x0` at `k = 0`.
pub fn solve_mf(p: &ProblemSpec, x0: &[f64], opts: &MfOptions) -> Result<SolveResult> {
    opts.validate()?;
    p.check_point(x0)?;
    let mu = opts.mu_for(p);
    if mu == 0.0 && !p.c().is_bounded() {
        return Err(SfpError::Config(
            "mu = 0 needs a bounded constraint set (ball, box or l1ball)".into(),
        ));
    }
    let stat_tol = opts.stationarity_tol_for(p);
    let resolved = MfOptions {
        mu_shift: Some(mu),
        ..opts.clone()
    };
    let mut notes = Vec::new();
    let mut x = feasible_start(p.c(), x0, &mut notes);
    let mut trace = TraceRecorder::new();
    let mut phi_x = p.gamma_objective(&x);
    let mut residual = p.stationarity_residual(&x);
    trace.push(0, &x, phi_x, p.fidelity(&x), residual, 0.0);
    let mut hit_zero = false;
    for k in 1..=opts.max_iter {
        if residual.value <= stat_tol {
            return Ok(finish(trace, x, Status::Converged, notes, hit_zero));
        }
        let x_tilde = mf_direction(p, &x, &resolved)?;
        let phi = |lambda: f64| p.gamma_objective(&along(&x, &x_tilde, lambda));
        let (lambda, phi_next) = golden_min(phi, opts.lambda_max, opts.golden_evals);
        let next = if lambda == 0.0 {
            x.clone()
        } else {
            p.c().project_unchecked(&along(&x, &x_tilde, lambda))
        };
        let moved = dist(&next, &x);
        x = next;
        phi_x = if lambda == 0.0 { phi_x } else { phi_next.min(p.gamma_objective(&x)) };
        hit_zero |= norm2(&x) == 0.0;
        residual = p.stationarity_residual(&x);
        trace.push(k, &x, phi_x, p.fidelity(&x), residual, moved);
        if moved <= opts.step_tol {
            return Ok(finish(trace, x, Status::Converged, notes, hit_zero));
        }
    }
    let status = if residual.value <= stat_tol {
        Status::Converged
    } else {
        Status::MaxIterations
    };
    Ok(finish(trace, x, status, notes, hit_zero))
}

fn finish(trace: TraceRecorder, x: Vec<f64>, status: Status, mut notes: Vec<String>, hit_zero: bool) -> SolveResult {
    if hit_zero {
        notes.push("iterate reached the origin; used the zero subgradient of ‖·‖₂".into());
    }
    trace.finish(x, status, notes)
}
