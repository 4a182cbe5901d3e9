//! Hybrid forward-backward / Douglas-Rachford solvers for the convex subproblem
//!
//! ```text
//! min_{x ∈ C} ½‖(I − P_Q)Ax‖² + ⟨x, v⟩ + γ‖x‖₁
//! ```
//!
//! that every DCA step has to solve.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SfpError};
use crate::linops::{dist, dot, norm1};
use crate::problem::{feasible_start, ProblemSpec, SolveResult, Stationarity, Status, TraceRecorder};
use crate::prox::shrink;
use crate::sets::MEMBERSHIP_TOL;

/// The l1-regularized subproblem: a base problem plus a linear term `⟨x, v⟩`.
#[derive(Debug, Clone)]
pub struct SubproblemSpec<'a> {
    base: &'a ProblemSpec,
    v: Vec<f64>,
}

impl<'a> SubproblemSpec<'a> {
    pub fn new(base: &'a ProblemSpec, v: Vec<f64>) -> Result<Self> {
        if v.len() != base.n() {
            return Err(SfpError::dim("subproblem linear term", base.n(), v.len()));
        }
        Ok(Self { base, v })
    }

    pub fn base(&self) -> &ProblemSpec {
        self.base
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Subproblem objective, `+∞` off `C`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        if !self.base.c().is_member(x, MEMBERSHIP_TOL) {
            return f64::INFINITY;
        }
        self.base.fidelity(x) + dot(x, &self.v) + self.base.gamma() * norm1(x)
    }

    /// Gradient of the smooth part, `Aᵗ(I − P_Q)Ax + v`.
    pub fn smooth_gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.base.fidelity_gradient(x);
        g.iter_mut().zip(&self.v).for_each(|(gi, vi)| *gi += vi);
        g
    }
}

/// Growing inner budget `min(start + k, cap)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InnerBudget {
    pub start: usize,
    pub cap: usize,
}

impl InnerBudget {
    pub fn at(&self, k: usize) -> usize {
        self.start.saturating_add(k).min(self.cap).max(1)
    }
}

impl Default for InnerBudget {
    fn default() -> Self {
        Self { start: 5, cap: 50 }
    }
}

/// Parameters shared by both hybrid solvers.
///
/// `kappa` is the Douglas-Rachford scale of the FB-in-DR scheme; `None` ties
/// it to the subproblem's `γ`. The DR-in-FB scheme always thresholds with the
/// subproblem's own `γ` and ignores it.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerOptions {
    pub kappa: Option<f64>,
    /// Constant DR relaxation `τ`.
    pub tau: f64,
    /// Step sizes are this fraction of their admissible upper bound.
    pub step_fraction: f64,
    /// Constant relaxation `λ` of the forward-backward updates, in `(0, 1]`.
    pub relaxation: f64,
    pub budget: InnerBudget,
    pub outer_max: usize,
    pub tol: f64,
    /// Fixed-point test for leaving the inner DR loop early.
    pub dr_exit_tol: f64,
    /// Precomputed `‖A‖` (already inflated); estimated on demand when absent.
    pub op_norm: Option<f64>,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self {
            kappa: None,
            tau: 1.0,
            step_fraction: 0.9,
            relaxation: 1.0,
            budget: InnerBudget::default(),
            outer_max: 10_000,
            tol: 1e-6,
            dr_exit_tol: 1e-12,
            op_norm: None,
        }
    }
}

impl InnerOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SfpError::Config(msg));
        if let Some(k) = self.kappa {
            if !(k > 0.0) || !k.is_finite() {
                return bad(format!("kappa must be > 0, got {k}"));
            }
        }
        if !(self.tau > 0.0 && self.tau < 2.0) {
            return bad(format!("tau must lie in (0, 2), got {}", self.tau));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return bad(format!("step fraction must lie in (0, 1), got {}", self.step_fraction));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return bad(format!("relaxation must lie in (0, 1], got {}", self.relaxation));
        }
        if self.outer_max == 0 || self.budget.cap == 0 {
            return bad("iteration budgets must be positive".into());
        }
        if !(self.tol > 0.0) || !(self.dr_exit_tol >= 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }

    fn op_norm_for(&self, p: &ProblemSpec) -> f64 {
        self.op_norm.unwrap_or_else(|| p.a().step_norm())
    }
}

/// Which hybrid scheme solves the subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerSolver {
    FbInDr,
    #[default]
    DrInFb,
}

impl InnerSolver {
    pub fn solve(self, s: &SubproblemSpec<'_>, opts: &InnerOptions, x0: &[f64]) -> Result<SolveResult> {
        match self {
            InnerSolver::FbInDr => solve_fb_in_dr(s, opts, x0),
            InnerSolver::DrInFb => solve_dr_in_fb(s, opts, x0),
        }
    }
}

impl fmt::Display for InnerSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InnerSolver::FbInDr => "fb-in-dr",
            InnerSolver::DrInFb => "dr-in-fb",
        })
    }
}

impl FromStr for InnerSolver {
    type Err = SfpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fb-in-dr" => Ok(InnerSolver::FbInDr),
            "dr-in-fb" => Ok(InnerSolver::DrInFb),
            other => Err(SfpError::Config(format!(
                "unknown inner solver '{other}' (expected fb-in-dr or dr-in-fb)"
            ))),
        }
    }
}

/// Douglas-Rachford on `γ‖·‖₁ + g₂`, where the prox of
/// `g₂ = ½‖(I−P_Q)A·‖² + ⟨·,v⟩ + i_C` is approximated by a warm-started
/// forward-backward loop of `N_k` steps. Returns the last half-step
/// `y_{k+1/2}`, which lies in `C`.
pub fn solve_fb_in_dr(s: &SubproblemSpec<'_>, opts: &InnerOptions, x0: &[f64]) -> Result<SolveResult> {
    opts.validate()?;
    let p = s.base();
    p.check_point(x0)?;
    let c = p.c();
    let gamma = p.gamma();
    let kappa = opts.kappa.unwrap_or(gamma);
    let lip = kappa * opts.op_norm_for(p).powi(2);
    // Forward step on κ(F + ⟨·,v⟩), backward step on ½‖· − y‖² + i_C.
    let fb_step = if lip > 0.0 {
        opts.step_fraction * 2.0 / lip
    } else {
        1.0
    };
    let threshold = kappa * gamma;

    let mut notes = Vec::new();
    let mut y = feasible_start(c, x0, &mut notes);
    let mut half = y.clone();
    let mut trace = TraceRecorder::new();
    for k in 0..opts.outer_max {
        let mut x = half;
        for _ in 0..opts.budget.at(k) {
            let g = s.smooth_gradient(&x);
            let z: Vec<f64> = x
                .iter()
                .zip(&g)
                .zip(&y)
                .map(|((xi, gi), yi)| (xi - fb_step * (kappa * gi - yi)) / (1.0 + fb_step))
                .collect();
            let pz = c.project_unchecked(&z);
            x.iter_mut()
                .zip(&pz)
                .for_each(|(xi, pi)| *xi += opts.relaxation * (pi - *xi));
        }
        half = x;
        let reflected: Vec<f64> = half.iter().zip(&y).map(|(h, yi)| 2.0 * h - yi).collect();
        let prox = shrink(&reflected, threshold);
        let y_next: Vec<f64> = y
            .iter()
            .zip(prox.iter().zip(&half))
            .map(|(yi, (pi, hi))| yi + opts.tau * (pi - hi))
            .collect();
        let step = dist(&y_next, &y);
        y = y_next;
        trace.push(
            k + 1,
            &half,
            s.objective(&half),
            p.fidelity(&half),
            Stationarity {
                value: dist(&prox, &half),
                proxy: true,
            },
            step,
        );
        if step <= opts.tol {
            return Ok(trace.finish(half, Status::Converged, notes));
        }
    }
    Ok(trace.finish(half, Status::MaxIterations, notes))
}

/// Forward-backward on `f₂ = ½‖(I−P_Q)A·‖² + ⟨·,v⟩` and `f₁ = γ‖·‖₁ + i_C`,
/// with `prox_{h f₁}` computed by an inner Douglas-Rachford loop of at most
/// `M_k` steps that exits once its iterate stops moving.
pub fn solve_dr_in_fb(s: &SubproblemSpec<'_>, opts: &InnerOptions, x0: &[f64]) -> Result<SolveResult> {
    opts.validate()?;
    let p = s.base();
    p.check_point(x0)?;
    let c = p.c();
    let norm = opts.op_norm_for(p);
    let fb_step = if norm > 0.0 {
        opts.step_fraction * 2.0 / (norm * norm)
    } else {
        1.0
    };
    let threshold = fb_step * p.gamma();

    let mut notes = Vec::new();
    let mut x = feasible_start(c, x0, &mut notes);
    let mut trace = TraceRecorder::new();
    for k in 0..opts.outer_max {
        let g = s.smooth_gradient(&x);
        let forward: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - fb_step * gi).collect();
        let (half, _) = dr_constrained_shrink(
            c,
            &forward,
            threshold,
            opts.tau,
            opts.budget.at(k),
            opts.dr_exit_tol,
        );
        let x_next: Vec<f64> = x
            .iter()
            .zip(&half)
            .map(|(xi, hi)| xi + opts.relaxation * (hi - xi))
            .collect();
        let step = dist(&x_next, &x);
        x = x_next;
        trace.push(
            k + 1,
            &x,
            s.objective(&x),
            p.fidelity(&x),
            Stationarity {
                value: step / fb_step,
                proxy: true,
            },
            step,
        );
        if step <= opts.tol {
            return Ok(trace.finish(x, Status::Converged, notes));
        }
    }
    Ok(trace.finish(x, Status::MaxIterations, notes))
}

/// Douglas-Rachford for `argmin_u i_C(u) + ½‖u − x'‖² + t‖u‖₁`.
///
/// Starts from `2S_t(x') − x'`, alternates `P_C((y + x')/2)` with the
/// soft-threshold reflection and stops after `budget` steps or once
/// `‖y_{i+1} − y_i‖ ≤ exit_tol`. Returns the last half-step and the number of
/// steps taken.
pub(crate) fn dr_constrained_shrink(
    c: &crate::sets::ClosedConvexSet,
    forward: &[f64],
    t: f64,
    tau: f64,
    budget: usize,
    exit_tol: f64,
) -> (Vec<f64>, usize) {
    let mut y: Vec<f64> = shrink(forward, t)
        .iter()
        .zip(forward)
        .map(|(s, f)| 2.0 * s - f)
        .collect();
    let mut half = Vec::new();
    let mut taken = 0;
    for _ in 0..budget {
        let mid: Vec<f64> = y.iter().zip(forward).map(|(a, b)| 0.5 * (a + b)).collect();
        half = c.project_unchecked(&mid);
        let reflected: Vec<f64> = half.iter().zip(&y).map(|(h, yi)| 2.0 * h - yi).collect();
        let prox = shrink(&reflected, t);
        let mut moved = 0.0;
        for ((yi, pi), hi) in y.iter_mut().zip(&prox).zip(&half) {
            let delta = tau * (pi - hi);
            moved += delta * delta;
            *yi += delta;
        }
        taken += 1;
        if moved.sqrt() <= exit_tol {
            break;
        }
    }
    (half, taken)
}
