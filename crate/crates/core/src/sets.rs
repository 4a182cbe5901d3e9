//! Closed convex sets with exact Euclidean projections.

use crate::error::{Result, SfpError};
use crate::linops::{dist, norm1};

/// Default tolerance for [`ClosedConvexSet::is_member`] checks inside the library.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Projection-oracle sets used for both the constraint set `C` and the target set `Q`.
///
/// Prefer the validating constructors; building a variant directly skips the
/// radius and bound checks.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedConvexSet {
    FullSpace(usize),
    NonnegativeOrthant(usize),
    Singleton(Vec<f64>),
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    L1Ball { radius: f64, dim: usize },
}

impl ClosedConvexSet {
    pub fn full_space(dim: usize) -> Self {
        Self::FullSpace(dim)
    }

    pub fn nonnegative_orthant(dim: usize) -> Self {
        Self::NonnegativeOrthant(dim)
    }

    pub fn singleton(point: Vec<f64>) -> Result<Self> {
        check_finite("singleton point", &point)?;
        Ok(Self::Singleton(point))
    }

    /// Closed Euclidean ball. A zero radius is accepted and behaves as a singleton.
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_finite("ball center", &center)?;
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(SfpError::InvalidArgument(format!(
                "ball radius must be finite and >= 0, got {radius}"
            )));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(SfpError::dim("box bounds", lower.len(), upper.len()));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u {
                return Err(SfpError::InvalidArgument(format!(
                    "box bound {i} has lower {l} > upper {u}"
                )));
            }
        }
        Ok(Self::Box { lower, upper })
    }

    pub fn l1_ball(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(SfpError::InvalidArgument(format!(
                "l1 ball radius must be finite and > 0, got {radius}"
            )));
        }
        Ok(Self::L1Ball { radius, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::FullSpace(n) | Self::NonnegativeOrthant(n) => *n,
            Self::Singleton(b) => b.len(),
            Self::Ball { center, .. } => center.len(),
            Self::Box { lower, .. } => lower.len(),
            Self::L1Ball { dim, .. } => *dim,
        }
    }

    /// True for sets that are a product of intervals handled coordinatewise
    /// by the exact stationarity residual.
    pub fn is_separable(&self) -> bool {
        matches!(
            self,
            Self::FullSpace(_) | Self::NonnegativeOrthant(_) | Self::Box { .. }
        )
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            Self::FullSpace(n) | Self::NonnegativeOrthant(n) => *n == 0,
            Self::Box { lower, upper } => lower
                .iter()
                .chain(upper)
                .all(|v| v.is_finite()),
            Self::Singleton(_) | Self::Ball { .. } | Self::L1Ball { .. } => true,
        }
    }

    /// Interval `[lo, hi]` of coordinate `i` for separable sets.
    pub(crate) fn interval(&self, i: usize) -> Option<(f64, f64)> {
        match self {
            Self::FullSpace(_) => Some((f64::NEG_INFINITY, f64::INFINITY)),
            Self::NonnegativeOrthant(_) => Some((0.0, f64::INFINITY)),
            Self::Box { lower, upper } => Some((lower[i], upper[i])),
            _ => None,
        }
    }

    /// Nearest point of the set to `x`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(SfpError::dim("project", self.dim(), x.len()));
        }
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::FullSpace(_) => x.to_vec(),
            Self::NonnegativeOrthant(_) => x.iter().map(|v| v.max(0.0)).collect(),
            Self::Singleton(b) => b.clone(),
            Self::Ball { center, radius } => {
                if *radius == 0.0 {
                    return center.clone();
                }
                let d = dist(x, center);
                if d <= *radius {
                    x.to_vec()
                } else {
                    let s = radius / d;
                    x.iter()
                        .zip(center)
                        .map(|(xi, ci)| ci + s * (xi - ci))
                        .collect()
                }
            }
            Self::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| v.max(*l).min(*u))
                .collect(),
            Self::L1Ball { radius, .. } => project_l1_ball(x, *radius),
        }
    }

    /// `‖x − P(x)‖ ≤ tol`; a dimension mismatch is never a member.
    pub fn is_member(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        dist(x, &self.project_unchecked(x)) <= tol
    }
}

fn check_finite(what: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(SfpError::InvalidArgument(format!("{what} has non-finite entries")))
    }
}

/// Sort-and-threshold projection onto `{v : ‖v‖₁ ≤ t}`.
fn project_l1_ball(x: &[f64], t: f64) -> Vec<f64> {
    if norm1(x) <= t {
        return x.to_vec();
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in mags.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - t) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    x.iter()
        .map(|v| v.signum() * (v.abs() - theta).max(0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::dot;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        dist(a, b) <= tol
    }

    /// Bisection on the threshold; independent of the sorting path.
    fn l1_oracle(x: &[f64], t: f64) -> Vec<f64> {
        if norm1(x) <= t {
            return x.to_vec();
        }
        let shrunk = |theta: f64| -> f64 { x.iter().map(|v| (v.abs() - theta).max(0.0)).sum() };
        let (mut lo, mut hi) = (0.0, x.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if shrunk(mid) > t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta = 0.5 * (lo + hi);
        x.iter()
            .map(|v| v.signum() * (v.abs() - theta).max(0.0))
            .collect()
    }

    /// Dense grid minimization of ‖v − x‖ over the 2-D l1 ball.
    fn l1_grid_2d(x: &[f64], t: f64) -> Vec<f64> {
        let h = 1e-3;
        let steps = (t / h).round() as i64;
        let mut best = (f64::INFINITY, vec![0.0, 0.0]);
        for i in -steps..=steps {
            for j in -steps..=steps {
                let v = [i as f64 * h, j as f64 * h];
                if norm1(&v) <= t + 1e-12 {
                    let d = dist(&v, x);
                    if d < best.0 {
                        best = (d, v.to_vec());
                    }
                }
            }
        }
        best.1
    }

    #[test]
    fn projection_examples() {
        let s = ClosedConvexSet::singleton(vec![1.0, 2.0]).unwrap();
        assert_eq!(s.project(&[9.0, -9.0]).unwrap(), vec![1.0, 2.0]);
        let ball = ClosedConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(close(&ball.project(&[3.0, 4.0]).unwrap(), &[0.6, 0.8], 1e-15));
        let orth = ClosedConvexSet::nonnegative_orthant(2);
        assert_eq!(orth.project(&[2.0, -3.0]).unwrap(), vec![2.0, 0.0]);
        let l1 = ClosedConvexSet::l1_ball(1.0, 2).unwrap();
        assert!(close(&l1.project(&[2.0, 0.0]).unwrap(), &[1.0, 0.0], 1e-15));
        assert!(close(&l1.project(&[1.0, 1.0]).unwrap(), &[0.5, 0.5], 1e-15));
        for x in [[2.0, 0.0], [1.0, 1.0]] {
            assert!(close(&l1.project(&x).unwrap(), &l1_grid_2d(&x, 1.0), 1.5e-3));
        }
        let degenerate = ClosedConvexSet::ball(vec![1.0, -1.0], 0.0).unwrap();
        assert_eq!(degenerate.project(&[5.0, 5.0]).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn membership_examples() {
        let ball = ClosedConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(ball.is_member(&[0.5, 0.0], 0.0));
        let s = ClosedConvexSet::singleton(vec![1.5, -2.0]).unwrap();
        assert!(s.is_member(&[1.5, -2.0], 0.0));
        let bx = ClosedConvexSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(bx.is_member(&[1.0005, 0.5], 1e-3));
        assert!(!bx.is_member(&[1.0005, 0.5], 1e-6));
        assert!(!bx.is_member(&[0.5], 1.0));
    }

    #[test]
    fn constructor_validation() {
        assert!(ClosedConvexSet::ball(vec![0.0], -1.0).is_err());
        assert!(ClosedConvexSet::boxed(vec![1.0], vec![0.0]).is_err());
        assert!(ClosedConvexSet::boxed(vec![1.0], vec![0.0, 1.0]).is_err());
        assert!(ClosedConvexSet::l1_ball(0.0, 3).is_err());
        assert!(ClosedConvexSet::singleton(vec![f64::INFINITY]).is_err());
        let s = ClosedConvexSet::full_space(3);
        assert!(matches!(s.project(&[1.0]), Err(SfpError::Dimension { .. })));
    }

    #[test]
    fn l1_projection_matches_bisection_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let n = rng.random_range(1..12);
            let t = rng.random_range(0.1..3.0);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let p = ClosedConvexSet::l1_ball(t, n).unwrap().project(&x).unwrap();
            assert!(close(&p, &l1_oracle(&x, t), 1e-10));
            assert!(norm1(&p) <= t + 1e-12);
        }
    }

    #[test]
    fn variational_inequality_on_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ball = ClosedConvexSet::ball(vec![0.5, -0.5, 1.0], 1.2).unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let z = ball.project(&(0..3).map(|_| rng.random_range(-5.0..5.0)).collect::<Vec<_>>()).unwrap();
            let p = ball.project(&x).unwrap();
            let lhs: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
            let rhs: Vec<f64> = z.iter().zip(&p).map(|(a, b)| a - b).collect();
            assert!(dot(&lhs, &rhs) <= 1e-9);
        }
    }

    #[test]
    fn separability_and_boundedness() {
        assert!(ClosedConvexSet::full_space(2).is_separable());
        assert!(!ClosedConvexSet::l1_ball(1.0, 2).unwrap().is_separable());
        assert!(!ClosedConvexSet::full_space(2).is_bounded());
        assert!(ClosedConvexSet::boxed(vec![0.0], vec![1.0]).unwrap().is_bounded());
        assert!(!ClosedConvexSet::boxed(vec![0.0], vec![f64::INFINITY]).unwrap().is_bounded());
    }
}
