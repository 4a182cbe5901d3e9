//! Forward-backward splitting with the closed-form `ℓ1 − ℓ2` prox, for
//! unconstrained problems (`C = ℝⁿ`).
//!
//! The iteration works on the rescaled objective `l + r` with
//! `l(x) = (1/2γ)‖(I − P_Q)Ax‖²` and `r = ‖·‖₁ − ‖·‖₂`:
//!
//! ```text
//! x_{k+1} = prox_{λr}(x_k − (λ/γ)·Aᵗ(I − P_Q)Ax_k)
//! ```

use crate::error::{Result, SfpError};
use crate::linops::dist;
use crate::problem::{ProblemSpec, SolveResult, Status, TraceRecorder};
use crate::prox::prox_l1_minus_l2_unchecked;
use crate::sets::ClosedConvexSet;

#[derive(Debug, Clone, PartialEq)]
pub struct FbOptions {
    step: f64,
    pub max_iter: usize,
    pub step_tol: f64,
    checked: bool,
}

impl FbOptions {
    /// Default step `0.9·γ/‖A‖²`.
    pub fn for_problem(p: &ProblemSpec) -> Self {
        Self {
            step: 0.9 * step_bound(p),
            max_iter: 1000,
            step_tol: 1e-5,
            checked: true,
        }
    }

    /// Explicit step, which must satisfy `0 < step < γ/‖A‖²`.
    pub fn with_step(p: &ProblemSpec, step: f64) -> Result<Self> {
        let bound = step_bound(p);
        if !(step > 0.0 && step < bound) {
            return Err(SfpError::Config(format!(
                "forward-backward step must lie in (0, γ/‖A‖² = {bound:.6e}), got {step}"
            )));
        }
        Ok(Self {
            step,
            ..Self::for_problem(p)
        })
    }

    /// Skips the step bound. Only meant for experiments that need to step
    /// outside the descent regime.
    pub fn unchecked(step: f64) -> Self {
        Self {
            step,
            max_iter: 1000,
            step_tol: 1e-5,
            checked: false,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}

/// `γ/‖A‖²`, with the inflated norm estimate; `+∞` for `A = 0`.
pub fn step_bound(p: &ProblemSpec) -> f64 {
    let norm = p.a().step_norm();
    if norm > 0.0 {
        p.gamma() / (norm * norm)
    } else {
        f64::INFINITY
    }
}

/// One application of the iteration map.
pub fn fb_map(p: &ProblemSpec, x: &[f64], step: f64) -> Vec<f64> {
    let g = p.fidelity_gradient(x);
    let scale = step / p.gamma();
    let forward: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - scale * gi).collect();
    prox_l1_minus_l2_unchecked(&forward, step)
}

/// Runs the iteration from `x0`. The trace objective is `Γ/γ`; the trace
/// starts with `x0` at `k = 0`.
pub fn solve_fb(p: &ProblemSpec, x0: &[f64], opts: &FbOptions) -> Result<SolveResult> {
    if !matches!(p.c(), ClosedConvexSet::FullSpace(_)) {
        return Err(SfpError::Config(
            "forward-backward splitting requires C = fullspace; for a constrained C \
             compose with Douglas-Rachford or use the dca/mf solvers"
                .into(),
        ));
    }
    p.check_point(x0)?;
    if !(opts.step > 0.0) || !opts.step.is_finite() {
        return Err(SfpError::Config(format!("step must be finite and > 0, got {}", opts.step)));
    }
    if opts.checked && opts.step >= step_bound(p) {
        return Err(SfpError::Config(format!(
            "step {} violates the bound γ/‖A‖² = {:.6e}",
            opts.step,
            step_bound(p)
        )));
    }
    if !(opts.step_tol > 0.0) || opts.max_iter == 0 {
        return Err(SfpError::Config("step_tol and max_iter must be positive".into()));
    }
    let gamma = p.gamma();
    let mut x = x0.to_vec();
    let mut trace = TraceRecorder::new();
    trace.push(0, &x, p.gamma_objective(&x) / gamma, p.fidelity(&x), p.stationarity_residual(&x), 0.0);
    for k in 1..=opts.max_iter {
        let next = fb_map(p, &x, opts.step);
        let moved = dist(&next, &x);
        x = next;
        trace.push(k, &x, p.gamma_objective(&x) / gamma, p.fidelity(&x), p.stationarity_residual(&x), moved);
        if !moved.is_finite() {
            break;
        }
        if moved <= opts.step_tol {
            return Ok(trace.finish(x, Status::Converged, Vec::new()));
        }
    }
    Ok(trace.finish(x, Status::MaxIterations, Vec::new()))
}
