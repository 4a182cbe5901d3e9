//! Unregularized reference methods: the CQ iteration and the modified CQ
//! iteration with half-space relaxations of an l1-ball and Armijo-type
//! backtracking.

use crate::error::{Result, SfpError};
use crate::linops::{dist, dot, norm1};
use crate::problem::{feasible_start, ProblemSpec, SolveResult, Stationarity, Status, TraceRecorder};
use crate::sets::ClosedConvexSet;

/// Backtracking is abandoned after this many halvings.
pub const MAX_BACKTRACKS: u32 = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct CqOptions {
    /// `None` means `1/‖A‖²`.
    pub step: Option<f64>,
    pub max_iter: usize,
    pub step_tol: f64,
}

impl Default for CqOptions {
    fn default() -> Self {
        Self {
            step: None,
            max_iter: 1000,
            step_tol: 1e-5,
        }
    }
}

/// `x_{k+1} = P_C(x_k − γ̂·Aᵗ(I − P_Q)Ax_k)`; the trace objective is the
/// fidelity `½‖(I − P_Q)Ax_k‖²` and starts at `k = 0`.
pub fn solve_cq(p: &ProblemSpec, x0: &[f64], opts: &CqOptions) -> Result<SolveResult> {
    p.check_point(x0)?;
    let step = match opts.step {
        Some(s) => s,
        None => {
            let norm = p.a().step_norm();
            if norm > 0.0 {
                1.0 / (norm * norm)
            } else {
                1.0
            }
        }
    };
    if !(step > 0.0) || !step.is_finite() {
        return Err(SfpError::Config(format!("CQ step must be finite and > 0, got {step}")));
    }
    if !(opts.step_tol > 0.0) || opts.max_iter == 0 {
        return Err(SfpError::Config("step_tol and max_iter must be positive".into()));
    }
    let mut notes = Vec::new();
    let mut x = feasible_start(p.c(), x0, &mut notes);
    let mut trace = TraceRecorder::new();
    let fid = p.fidelity(&x);
    trace.push(0, &x, fid, fid, gap(f64::NAN), 0.0);
    for k in 1..=opts.max_iter {
        let g = p.fidelity_gradient(&x);
        let forward: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
        let next = p.c().project_unchecked(&forward);
        let moved = dist(&next, &x);
        x = next;
        let fid = p.fidelity(&x);
        trace.push(k, &x, fid, fid, gap(moved / step), moved);
        if moved <= opts.step_tol {
            return Ok(trace.finish(x, Status::Converged, notes));
        }
    }
    Ok(trace.finish(x, Status::MaxIterations, notes))
}

fn gap(value: f64) -> Stationarity {
    Stationarity { value, proxy: true }
}

/// Componentwise sign with `0` at zero entries; an element of `∂‖·‖₁(x)`.
pub fn select_subgradient(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Value of the cut `c(x_k) + ⟨ξ_k, y − x_k⟩` with `c = ‖·‖₁ − t`.
pub fn cut_value(x_k: &[f64], t: f64, y: &[f64]) -> f64 {
    let xi = select_subgradient(x_k);
    let diff: Vec<f64> = y.iter().zip(x_k).map(|(a, b)| a - b).collect();
    norm1(x_k) - t + dot(&xi, &diff)
}

/// Projects `y` onto the half-space `{z : c(x_k) + ⟨ξ_k, z − x_k⟩ ≤ 0}`.
pub fn project_level_set(x_k: &[f64], t: f64, y: &[f64]) -> Result<Vec<f64>> {
    if x_k.len() != y.len() {
        return Err(SfpError::dim("level-set projection", x_k.len(), y.len()));
    }
    let xi = select_subgradient(x_k);
    let value = cut_value(x_k, t, y);
    if value <= 0.0 {
        return Ok(y.to_vec());
    }
    let xi_sq = dot(&xi, &xi);
    if xi_sq == 0.0 {
        return Err(SfpError::InfeasibleCut(format!(
            "zero subgradient with c(x_k) = {value} > 0; the half-space is empty"
        )));
    }
    let scale = value / xi_sq;
    Ok(y.iter().zip(&xi).map(|(yi, s)| yi - scale * s).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct McqOptions {
    pub l: f64,
    pub mu: f64,
    pub sigma: f64,
    /// l1 level of `c(x) = ‖x‖₁ − t`; `None` takes the radius of an
    /// `L1Ball` constraint set.
    pub t: Option<f64>,
    pub max_iter: usize,
    pub step_tol: f64,
}

impl Default for McqOptions {
    fn default() -> Self {
        Self {
            l: 0.5,
            mu: 0.5,
            sigma: 1.0,
            t: None,
            max_iter: 1000,
            step_tol: 1e-5,
        }
    }
}

impl McqOptions {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.l) || !open_unit(self.mu) {
            return Err(SfpError::Config(format!(
                "l and mu must lie in (0, 1), got l = {}, mu = {}",
                self.l, self.mu
            )));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(SfpError::Config(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if let Some(t) = self.t {
            if !(t > 0.0) || !t.is_finite() {
                return Err(SfpError::Config(format!("t must be > 0, got {t}")));
            }
        }
        if !(self.step_tol > 0.0) || self.max_iter == 0 {
            return Err(SfpError::Config("step_tol and max_iter must be positive".into()));
        }
        Ok(())
    }

    fn level_for(&self, p: &ProblemSpec) -> Result<f64> {
        match (p.c(), self.t) {
            (ClosedConvexSet::L1Ball { radius, .. }, None) => Ok(*radius),
            (ClosedConvexSet::L1Ball { .. } | ClosedConvexSet::FullSpace(_), Some(t)) => Ok(t),
            (ClosedConvexSet::FullSpace(_), None) => Err(SfpError::Config(
                "modified CQ needs the l1 level t (or C = l1ball)".into(),
            )),
            _ => Err(SfpError::Config(
                "modified CQ works on C = {‖x‖₁ ≤ t}; use C = fullspace or l1ball".into(),
            )),
        }
    }
}

/// One modified CQ step.
#[derive(Debug, Clone)]
pub struct McqStep {
    pub x_next: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub alpha: f64,
    /// `m_k`; `None` when the backtracking cap was reached.
    pub backtracks: Option<u32>,
}

pub fn mcq_step(p: &ProblemSpec, x_k: &[f64], t: f64, opts: &McqOptions) -> Result<McqStep> {
    p.check_point(x_k)?;
    let g = p.fidelity_gradient(x_k);
    let mut alpha = opts.sigma;
    for m in 0..=MAX_BACKTRACKS {
        let trial: Vec<f64> = x_k.iter().zip(&g).map(|(xi, gi)| xi - alpha * gi).collect();
        let x_bar = project_level_set(x_k, t, &trial)?;
        let g_bar = p.fidelity_gradient(&x_bar);
        let lhs = dist(&g, &g_bar);
        let rhs = opts.mu * dist(x_k, &x_bar) / alpha;
        // relative slack absorbs rounding when both sides agree exactly
        if lhs <= rhs * (1.0 + 1e-12) {
            let extra: Vec<f64> = x_k.iter().zip(&g_bar).map(|(xi, gi)| xi - alpha * gi).collect();
            let x_next = project_level_set(x_k, t, &extra)?;
            return Ok(McqStep {
                x_next,
                x_bar,
                alpha,
                backtracks: Some(m),
            });
        }
        if m < MAX_BACKTRACKS {
            alpha *= opts.l;
        }
    }
    Ok(McqStep {
        x_next: x_k.to_vec(),
        x_bar: x_k.to_vec(),
        alpha,
        backtracks: None,
    })
}

/// Modified CQ iteration over `{‖x‖₁ ≤ t}`. The trace objective is the
/// fidelity; `l1_norm` tracks `‖x_k‖₁`.
pub fn solve_mcq(p: &ProblemSpec, x0: &[f64], opts: &McqOptions) -> Result<SolveResult> {
    opts.validate()?;
    p.check_point(x0)?;
    let t = opts.level_for(p)?;
    let mut x = x0.to_vec();
    let mut trace = TraceRecorder::new();
    let fid = p.fidelity(&x);
    trace.push(0, &x, fid, fid, gap(f64::NAN), 0.0);
    let mut notes = Vec::new();
    for k in 1..=opts.max_iter {
        let step = mcq_step(p, &x, t, opts)?;
        if step.backtracks.is_none() {
            notes.push(format!(
                "backtracking cap of {MAX_BACKTRACKS} reached at iteration {k}"
            ));
            return Ok(trace.finish(x, Status::MaxIterations, notes));
        }
        let moved = dist(&step.x_next, &x);
        let residual = dist(&x, &step.x_bar) / step.alpha;
        x = step.x_next;
        let fid = p.fidelity(&x);
        trace.push(k, &x, fid, fid, gap(residual), moved);
        if moved <= opts.step_tol {
            return Ok(trace.finish(x, Status::Converged, notes));
        }
    }
    Ok(trace.finish(x, Status::MaxIterations, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::DenseMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn cq_single_exact_step() {
        let p = ProblemSpec::new(
            DenseMatrix::identity(2),
            ClosedConvexSet::nonnegative_orthant(2),
            ClosedConvexSet::singleton(vec![1.0, -2.0]).unwrap(),
            0.1,
        )
        .unwrap();
        let opts = CqOptions {
            step: Some(1.0),
            max_iter: 1,
            ..CqOptions::default()
        };
        let r = solve_cq(&p, &[3.0, 4.0], &opts).unwrap();
        assert_eq!(r.x, vec![1.0, 0.0]);
    }

    #[test]
    fn cq_fixed_point_and_consistent_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (m, n) = (20, 50);
        let a = DenseMatrix::new(m, n, (0..m * n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap();
        let truth: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let b = a.apply(&truth).unwrap();
        let p = ProblemSpec::new(
            a,
            ClosedConvexSet::nonnegative_orthant(n),
            ClosedConvexSet::singleton(b).unwrap(),
            0.6,
        )
        .unwrap();
        let r = solve_cq(&p, &truth, &CqOptions::default()).unwrap();
        assert_eq!(r.iterations(), 1);
        assert!(r.trace[1].step_norm <= 1e-12);

        let opts = CqOptions {
            step_tol: 1e-15,
            ..CqOptions::default()
        };
        let r = solve_cq(&p, &vec![0.0; n], &opts).unwrap();
        assert!(r.trace.iter().any(|t| t.objective <= 1e-10));
        for w in r.trace.windows(2) {
            assert!(w[1].objective <= w[0].objective + 1e-12);
        }
    }

    #[test]
    fn subgradient_selection() {
        assert_eq!(select_subgradient(&[2.0, -3.0, 0.0]), vec![1.0, -1.0, 0.0]);
        assert_eq!(select_subgradient(&[0.0; 3]), vec![0.0; 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0) * rng.random_range(0..2) as f64).collect();
            let y: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let xi = select_subgradient(&x);
            let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            assert!(norm1(&y) >= norm1(&x) + dot(&xi, &diff) - 1e-12);
        }
    }

    #[test]
    fn level_set_projection_examples() {
        let x = [2.0, 0.0];
        assert_eq!(project_level_set(&x, 1.0, &x).unwrap(), vec![1.0, 0.0]);
        assert_eq!(project_level_set(&x, 1.0, &[0.5, 3.0]).unwrap(), vec![0.5, 3.0]);
        assert!(project_level_set(&[0.0, 0.0], 1.0, &[5.0, 5.0]).is_ok());
        assert!(matches!(
            project_level_set(&[0.0, 0.0], -1.0, &[5.0, 5.0]),
            Err(SfpError::InfeasibleCut(_))
        ));
    }

    #[test]
    fn level_set_against_constrained_grid() {
        // minimize distance to y over the half-space on a grid
        let (x, t, y) = ([1.5, -0.5], 1.0, [1.2, 0.4]);
        let got = project_level_set(&x, t, &y).unwrap();
        let h = 1e-3;
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for i in -1000..=3000 {
            for j in -2000..=2000 {
                let z = [i as f64 * h, j as f64 * h];
                if cut_value(&x, t, &z) <= 1e-12 {
                    let d = dist(&z, &y);
                    if d < best.0 {
                        best = (d, z);
                    }
                }
            }
        }
        assert!(dist(&got, &best.1) <= 2e-3);
    }

    #[test]
    fn cuts_contain_the_level_set_and_hold_after_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let t = rng.random_range(0.1..3.0);
            let y: Vec<f64> = (0..4).map(|_| rng.random_range(-4.0..4.0)).collect();
            let proj = project_level_set(&x, t, &y).unwrap();
            assert!(cut_value(&x, t, &proj) <= 1e-12);
            let z: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let z = ClosedConvexSet::l1_ball(t, 4).unwrap().project(&z).unwrap();
            assert!(cut_value(&x, t, &z) <= 1e-12);
        }
    }

    fn unit_design(b: Vec<f64>) -> ProblemSpec {
        let n = b.len();
        ProblemSpec::new(
            DenseMatrix::identity(n),
            ClosedConvexSet::full_space(n),
            ClosedConvexSet::singleton(b).unwrap(),
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn unit_design_backtracking_count() {
        let p = unit_design(vec![0.3, -0.2, 0.1]);
        for (sigma, l, mu) in [(1.0, 0.5, 0.5), (1.0, 0.5, 0.3), (2.0, 0.7, 0.1)] {
            let opts = McqOptions { sigma, l, mu, ..McqOptions::default() };
            let s = mcq_step(&p, &[1.0, 1.0, -1.0], 10.0, &opts).unwrap();
            let expected = ((mu / sigma).ln() / l.ln()).ceil() as u32;
            assert_eq!(s.backtracks, Some(expected), "sigma={sigma} l={l} mu={mu}");
        }
    }

    #[test]
    fn fixed_point_accepts_first_trial() {
        let p = unit_design(vec![0.3, -0.2]);
        let s = mcq_step(&p, &[0.3, -0.2], 10.0, &McqOptions::default()).unwrap();
        assert_eq!(s.backtracks, Some(0));
        assert_eq!(s.x_next, vec![0.3, -0.2]);
    }

    #[test]
    fn mcq_recovers_lasso_feasible_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let (m, n) = (30, 60);
        let a = DenseMatrix::new(m, n, (0..m * n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap();
        let mut truth = vec![0.0; n];
        for i in [3, 17, 40] {
            truth[i] = 1.0;
        }
        let b = a.apply(&truth).unwrap();
        let p = ProblemSpec::new(a, ClosedConvexSet::full_space(n), ClosedConvexSet::singleton(b).unwrap(), 0.6).unwrap();
        let opts = McqOptions {
            t: Some(norm1(&truth)),
            step_tol: 1e-10,
            max_iter: 20_000,
            ..McqOptions::default()
        };
        let r = solve_mcq(&p, &vec![0.0; n], &opts).unwrap();
        assert!(r.trace.iter().all(|row| row.l1_norm.is_finite()));
        assert!(r.trace.last().unwrap().objective < r.trace[0].objective);
        assert!(norm1(&r.x) <= norm1(&truth) + 1e-6, "{} {:?}", norm1(&r.x), r.status);
        let mut x = vec![0.0; n];
        for _ in 0..50 {
            let s = mcq_step(&p, &x, 3.0, &opts).unwrap();
            assert!(cut_value(&x, 3.0, &s.x_next) <= 1e-12);
            x = s.x_next;
        }
        let mcq_bad = McqOptions::default();
        assert!(solve_mcq(&p, &vec![0.0; n], &mcq_bad).is_err());
    }
}
