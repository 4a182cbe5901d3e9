//! Difference-of-convex outer loop.
//!
//! Each step linearizes `−γ‖·‖₂` at the current iterate (subgradient 0 at the
//! origin) and hands the resulting l1-regularized convex problem to one of the
//! hybrid solvers in [`crate::inner`].

use crate::error::{Result, SfpError};
use crate::inner::{InnerOptions, InnerSolver, SubproblemSpec};
use crate::linops::{dist, norm2};
use crate::problem::{feasible_start, ProblemSpec, SolveResult, Status, TraceRecorder};

#[derive(Debug, Clone, PartialEq)]
pub struct DcaOptions {
    pub inner_solver: InnerSolver,
    /// `tol`, `outer_max` and `op_norm` here are overridden per solve; see
    /// [`DcaOptions::inner_tol`].
    pub inner_opts: InnerOptions,
    pub max_outer: usize,
    pub step_tol: f64,
    /// Norm below which an iterate counts as the origin. `None` means
    /// `1e-12·(1 + ‖x₀‖)`.
    pub zero_tol: Option<f64>,
    /// Stopping tolerance handed to the inner solver. `None` means
    /// `min(1e-6, step_tol/10) / max(1, ‖A‖²)`.
    pub inner_tol: Option<f64>,
    pub inner_max: usize,
}

impl Default for DcaOptions {
    fn default() -> Self {
        Self {
            inner_solver: InnerSolver::default(),
            inner_opts: InnerOptions::default(),
            max_outer: 1000,
            step_tol: 1e-5,
            zero_tol: None,
            inner_tol: None,
            inner_max: 10_000,
        }
    }
}

impl DcaOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_tol > 0.0) {
            return Err(SfpError::Config(format!("step_tol must be > 0, got {}", self.step_tol)));
        }
        if let Some(z) = self.zero_tol {
            if !(z >= 0.0) {
                return Err(SfpError::Config(format!("zero_tol must be >= 0, got {z}")));
            }
        }
        if let Some(t) = self.inner_tol {
            if !(t > 0.0) {
                return Err(SfpError::Config(format!("inner_tol must be > 0, got {t}")));
            }
        }
        if self.max_outer == 0 || self.inner_max == 0 {
            return Err(SfpError::Config("iteration budgets must be positive".into()));
        }
        self.inner_opts.validate()
    }

    fn resolved_inner(&self, op_norm: f64) -> InnerOptions {
        let ladder = (self.step_tol / 10.0).min(1e-6) / (op_norm * op_norm).max(1.0);
        InnerOptions {
            tol: self.inner_tol.unwrap_or(ladder),
            outer_max: self.inner_max,
            op_norm: Some(self.inner_opts.op_norm.unwrap_or(op_norm)),
            ..self.inner_opts.clone()
        }
    }
}

/// Result of one outer step.
#[derive(Debug, Clone)]
pub struct DcaStep {
    pub x: Vec<f64>,
    /// `MaxIterations` when the inner solver ran out of budget; `x` is then
    /// its last iterate.
    pub inner_status: Status,
    pub inner_iterations: usize,
}

/// One DCA step from `x_k`, warm-starting the inner solver at `x_k`.
pub fn dca_step(p: &ProblemSpec, x_k: &[f64], opts: &DcaOptions) -> Result<DcaStep> {
    opts.validate()?;
    p.check_point(x_k)?;
    let zero_tol = opts.zero_tol.unwrap_or(1e-12 * (1.0 + norm2(x_k)));
    let inner = opts.resolved_inner(p.a().step_norm());
    step_with(p, x_k, opts.inner_solver, &inner, zero_tol)
}

fn step_with(
    p: &ProblemSpec,
    x_k: &[f64],
    solver: InnerSolver,
    inner: &InnerOptions,
    zero_tol: f64,
) -> Result<DcaStep> {
    let nx = norm2(x_k);
    let v = if nx <= zero_tol {
        vec![0.0; x_k.len()]
    } else {
        x_k.iter().map(|xi| -p.gamma() * xi / nx).collect()
    };
    let sub = SubproblemSpec::new(p, v)?;
    let r = solver.solve(&sub, inner, x_k)?;
    Ok(DcaStep {
        inner_iterations: r.iterations(),
        inner_status: r.status,
        x: r.x,
    })
}

/// Runs DCA from `x0` until the step norm drops to `step_tol`, the iterates
/// stay at the origin, or `max_outer` steps have been taken.
///
/// The trace starts with the (projected) start point at `k = 0` and records
/// `Γ`, the stationarity residual and the step norm for every iterate.
pub fn solve_dca(p: &ProblemSpec, x0: &[f64], opts: &DcaOptions) -> Result<SolveResult> {
    opts.validate()?;
    p.check_point(x0)?;
    let zero_tol = opts.zero_tol.unwrap_or(1e-12 * (1.0 + norm2(x0)));
    let inner = opts.resolved_inner(p.a().step_norm());

    let mut notes = Vec::new();
    let mut x = feasible_start(p.c(), x0, &mut notes);
    let mut trace = TraceRecorder::new();
    trace.push(0, &x, p.gamma_objective(&x), p.fidelity(&x), p.stationarity_residual(&x), 0.0);
    let mut inner_exhausted = 0usize;
    let mut status = Status::MaxIterations;
    for k in 1..=opts.max_outer {
        let step = step_with(p, &x, opts.inner_solver, &inner, zero_tol)?;
        if step.inner_status == Status::MaxIterations {
            inner_exhausted += 1;
        }
        let moved = dist(&step.x, &x);
        let both_zero = norm2(&x) <= zero_tol && norm2(&step.x) <= zero_tol;
        x = step.x;
        trace.push(k, &x, p.gamma_objective(&x), p.fidelity(&x), p.stationarity_residual(&x), moved);
        if both_zero {
            status = Status::ZeroStationary;
            break;
        }
        if moved <= opts.step_tol {
            status = Status::Converged;
            break;
        }
    }
    if inner_exhausted > 0 {
        notes.push(format!("inner solver hit its iteration cap in {inner_exhausted} outer steps"));
    }
    Ok(trace.finish(x, status, notes))
}
