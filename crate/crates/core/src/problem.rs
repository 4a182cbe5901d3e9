//! Problem instances, the regularized objective and stationarity measurement.

use std::fmt;
use std::time::Instant;

use crate::error::{Result, SfpError};
use crate::linops::{dist, norm1, norm2, norm_inf, residual_from_image, DenseMatrix};
use crate::prox::{l1_minus_l2, shrink};
use crate::sets::{ClosedConvexSet, MEMBERSHIP_TOL};

/// Relative width of the band in which a coordinate counts as sitting on zero
/// or on a bound when the exact stationarity residual is evaluated.
pub const ACTIVE_TOL: f64 = 1e-9;

/// `min_{x ∈ C} ½‖(I − P_Q)Ax‖² + γ(‖x‖₁ − ‖x‖₂)`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    a: DenseMatrix,
    c: ClosedConvexSet,
    q: ClosedConvexSet,
    gamma: f64,
}

impl ProblemSpec {
    pub fn new(a: DenseMatrix, c: ClosedConvexSet, q: ClosedConvexSet, gamma: f64) -> Result<Self> {
        if c.dim() != a.cols() {
            return Err(SfpError::dim("constraint set C", a.cols(), c.dim()));
        }
        if q.dim() != a.rows() {
            return Err(SfpError::dim("target set Q", a.rows(), q.dim()));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(SfpError::InvalidArgument(format!(
                "gamma must be finite and > 0, got {gamma}"
            )));
        }
        Ok(Self { a, c, q, gamma })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn c(&self) -> &ClosedConvexSet {
        &self.c
    }

    pub fn q(&self) -> &ClosedConvexSet {
        &self.q
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Same data with a different constraint set.
    pub fn with_constraint(&self, c: ClosedConvexSet) -> Result<Self> {
        Self::new(self.a.clone(), c, self.q.clone(), self.gamma)
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(SfpError::dim("iterate", self.n(), x.len()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SfpError::InvalidArgument("iterate has non-finite entries".into()));
        }
        Ok(())
    }

    /// `(I − P_Q)Ax`
    pub(crate) fn image_residual(&self, x: &[f64]) -> Vec<f64> {
        residual_from_image(&self.q, &self.a.apply_unchecked(x))
    }

    /// `½‖(I − P_Q)Ax‖²`
    pub fn fidelity(&self, x: &[f64]) -> f64 {
        let r = self.image_residual(x);
        0.5 * r.iter().map(|v| v * v).sum::<f64>()
    }

    /// `Aᵗ(I − P_Q)Ax`
    pub fn fidelity_gradient(&self, x: &[f64]) -> Vec<f64> {
        self.a.apply_transpose_unchecked(&self.image_residual(x))
    }

    /// Objective including the indicator of `C`; `+∞` off `C`.
    pub fn gamma_objective(&self, x: &[f64]) -> f64 {
        if !self.c.is_member(x, MEMBERSHIP_TOL) {
            return f64::INFINITY;
        }
        self.fidelity(x) + self.gamma * l1_minus_l2(x)
    }

    /// Distance from `−(Aᵗ(I−P_Q)Ax − γx/‖x‖₂)` to `γ∂‖x‖₁ + N_C(x)`.
    ///
    /// Exact for separable `C`; for the other sets the prox fixed-point gap
    /// `‖x − P_C(S_γ(x − g))‖` is returned and flagged as a proxy. At `x = 0`
    /// the `‖·‖₂` term contributes the zero subgradient.
    pub fn stationarity_residual(&self, x: &[f64]) -> Stationarity {
        let grad = self.fidelity_gradient(x);
        self.stationarity_from_gradient(x, &grad)
    }

    pub(crate) fn stationarity_from_gradient(&self, x: &[f64], smooth_grad: &[f64]) -> Stationarity {
        let nx = norm2(x);
        let g: Vec<f64> = if nx > 0.0 {
            smooth_grad
                .iter()
                .zip(x)
                .map(|(gi, xi)| gi - self.gamma * xi / nx)
                .collect()
        } else {
            smooth_grad.to_vec()
        };
        if self.c.is_separable() {
            Stationarity {
                value: separable_residual(&self.c, x, &g, self.gamma),
                proxy: false,
            }
        } else {
            let z: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - b).collect();
            let p = self.c.project_unchecked(&shrink(&z, self.gamma));
            Stationarity {
                value: dist(x, &p),
                proxy: true,
            }
        }
    }
}

fn separable_residual(c: &ClosedConvexSet, x: &[f64], g: &[f64], gamma: f64) -> f64 {
    let band = ACTIVE_TOL * norm_inf(x).max(1.0);
    let mut acc = 0.0;
    for (i, (&xi, &gi)) in x.iter().zip(g).enumerate() {
        let (lo, hi) = c.interval(i).expect("separable set");
        if xi < lo - band || xi > hi + band {
            return f64::INFINITY;
        }
        let target = -gi;
        let (mut s_lo, mut s_hi) = if xi.abs() <= band {
            (-gamma, gamma)
        } else {
            let s = gamma * xi.signum();
            (s, s)
        };
        if xi - lo <= band {
            s_lo = f64::NEG_INFINITY;
        }
        if hi - xi <= band {
            s_hi = f64::INFINITY;
        }
        let d = (s_lo - target).max(target - s_hi).max(0.0);
        acc += d * d;
    }
    acc.sqrt()
}

/// Stationarity measurement; `proxy` marks the fixed-point gap used for
/// non-separable constraint sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity {
    pub value: f64,
    pub proxy: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIterations,
    ZeroStationary,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::MaxIterations => "max-iterations",
            Status::ZeroStationary => "zero-stationary",
        })
    }
}

/// One row of a solver trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    /// Objective the algorithm descends on: `Γ` for the l1 − l2 methods, `Γ/γ`
    /// for forward-backward, the fidelity term for the CQ baselines.
    pub objective: f64,
    pub fidelity: f64,
    pub l1_norm: f64,
    pub residual: f64,
    pub residual_is_proxy: bool,
    pub step_norm: f64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub status: Status,
    pub trace: Vec<IterateRecord>,
    /// Free-form diagnostics (start-point projection, backtracking caps, ...).
    pub notes: Vec<String>,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.k)
    }

    pub fn final_objective(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.objective)
    }
}

/// Accumulates trace rows with wall time measured from construction.
pub(crate) struct TraceRecorder {
    start: Instant,
    rows: Vec<IterateRecord>,
}

impl TraceRecorder {
    pub fn new() -> Self {
        Self {
            start: Instant::now(),
            rows: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        k: usize,
        x: &[f64],
        objective: f64,
        fidelity: f64,
        residual: Stationarity,
        step_norm: f64,
    ) {
        self.rows.push(IterateRecord {
            k,
            objective,
            fidelity,
            l1_norm: norm1(x),
            residual: residual.value,
            residual_is_proxy: residual.proxy,
            step_norm,
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
        });
    }

    pub fn finish(self, x: Vec<f64>, status: Status, notes: Vec<String>) -> SolveResult {
        SolveResult {
            x,
            status,
            trace: self.rows,
            notes,
        }
    }
}

/// Projects an infeasible start point onto `C`, leaving a note when it moves.
pub(crate) fn feasible_start(c: &ClosedConvexSet, x0: &[f64], notes: &mut Vec<String>) -> Vec<f64> {
    if c.is_member(x0, MEMBERSHIP_TOL) {
        x0.to_vec()
    } else {
        let p = c.project_unchecked(x0);
        notes.push(format!(
            "start point projected onto C (moved by {:.3e})",
            dist(x0, &p)
        ));
        p
    }
}
