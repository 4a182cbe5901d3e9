//! Brute-force grid oracle for the `ℓ1 − ℓ2` prox.
//!
//! For `F(v) = λ(‖v‖₁ − ‖v‖₂) + ½‖v − y‖²` two facts keep the search small
//! without assuming anything about the closed form:
//!
//! * flipping `vᵢ` to the sign of `yᵢ` leaves the penalty unchanged and does
//!   not increase the distance term, so the sign orthant of `y` contains a
//!   minimizer;
//! * the penalty is nonnegative, so any `v` with `½‖v − y‖² > U` loses to a
//!   candidate of value `U`.
//!
//! The grid is therefore restricted to the sign orthant and to the ball
//! `‖v − y‖ ≤ √(2U)`, where `U` is the best of `0`, `y` and the 1-sparse
//! vectors `yᵢeᵢ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linops::dist;
use crate::prox::{l1_minus_l2, prox_l1_minus_l2};

pub fn prox_objective(v: &[f64], y: &[f64], lambda: f64) -> f64 {
    lambda * l1_minus_l2(v) + 0.5 * dist(v, y).powi(2)
}

/// Best objective among `0`, `y` and the 1-sparse vectors `yᵢeᵢ`.
pub(crate) fn elementary_bound(y: &[f64], lambda: f64) -> f64 {
    let mut upper = prox_objective(&vec![0.0; y.len()], y, lambda).min(prox_objective(y, y, lambda));
    for i in 0..y.len() {
        let mut e = vec![0.0; y.len()];
        e[i] = y[i];
        upper = upper.min(prox_objective(&e, y, lambda));
    }
    upper
}

/// Grid indices `k ≥ 0` with `(k·h − c)² ≤ budget`.
fn window(c: f64, budget: f64, h: f64) -> std::ops::RangeInclusive<i64> {
    let r = budget.max(0.0).sqrt();
    let lo = ((c - r) / h).ceil().max(0.0) as i64;
    let hi = ((c + r) / h).floor() as i64;
    lo..=hi
}

/// Minimum of the prox objective over the grid `hℤⁿ` (n = 2 or 3) and the
/// elementary candidates, exact up to the grid resolution.
pub fn grid_minimum(y: &[f64], lambda: f64, h: f64) -> f64 {
    assert!(matches!(y.len(), 2 | 3), "grid oracle supports 2 or 3 dimensions");
    let ay: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    let upper = elementary_bound(&ay, lambda);
    let budget = 2.0 * upper;
    // on the sign orthant ‖v‖₁ is the plain sum
    let f = |l1: f64, sq: f64, d: f64| lambda * (l1 - sq.sqrt()) + 0.5 * d;
    let mut best = upper;
    for i in window(ay[0], budget, h) {
        let v0 = i as f64 * h;
        let d0 = (v0 - ay[0]).powi(2);
        for j in window(ay[1], budget - d0, h) {
            let v1 = j as f64 * h;
            let d1 = d0 + (v1 - ay[1]).powi(2);
            if ay.len() == 2 {
                best = best.min(f(v0 + v1, v0 * v0 + v1 * v1, d1));
                continue;
            }
            for l in window(ay[2], budget - d1, h) {
                let v2 = l as f64 * h;
                let d2 = d1 + (v2 - ay[2]).powi(2);
                best = best.min(f(v0 + v1 + v2, v0 * v0 + v1 * v1 + v2 * v2, d2));
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxCheckReport {
    pub samples: usize,
    /// Largest `|F(prox) − grid minimum|` over all samples.
    pub max_gap: f64,
    /// Largest `F(prox) − grid minimum` (how much the closed form loses).
    pub max_excess: f64,
    pub worst_y: Vec<f64>,
    pub worst_lambda: f64,
    /// Samples per regime: `λ < ‖y‖∞`, `λ = ‖y‖∞`, `λ > ‖y‖∞`.
    pub regime_counts: [usize; 3],
}

/// Compares `prox_l1_minus_l2` with [`grid_minimum`] on `n2` two-dimensional
/// and `n3` three-dimensional random inputs, cycling through the three
/// regimes of `λ` relative to `‖y‖∞`.
pub fn run_prox_check(seed: u64, n2: usize, n3: usize, h: f64) -> ProxCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProxCheckReport {
        samples: 0,
        max_gap: 0.0,
        max_excess: f64::NEG_INFINITY,
        worst_y: Vec::new(),
        worst_lambda: 0.0,
        regime_counts: [0; 3],
    };
    for s in 0..n2 + n3 {
        let (dim, scale) = if s < n2 { (2, 1.0) } else { (3, 0.2) };
        let y: Vec<f64> = (0..dim).map(|_| rng.random_range(-scale..scale)).collect();
        let ymax = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if ymax == 0.0 {
            continue;
        }
        let regime = s % 3;
        let lambda = match regime {
            0 => ymax * rng.random_range(0.05..0.95),
            1 => ymax,
            _ => ymax * rng.random_range(1.05..2.0),
        };
        let v = prox_l1_minus_l2(&y, lambda).expect("lambda > 0");
        let diff = prox_objective(&v, &y, lambda) - grid_minimum(&y, lambda, h);
        report.samples += 1;
        report.regime_counts[regime] += 1;
        report.max_excess = report.max_excess.max(diff);
        if diff.abs() > report.max_gap || report.worst_y.is_empty() {
            report.max_gap = report.max_gap.max(diff.abs());
            report.worst_y = y;
            report.worst_lambda = lambda;
        }
    }
    report
}
