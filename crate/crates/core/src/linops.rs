//! Dense row-major matrices and the handful of vector kernels the solvers need.

use crate::error::{Result, SfpError};
use crate::sets::ClosedConvexSet;

/// Iteration cap used by [`DenseMatrix::step_norm`].
pub const NORM_MAX_ITERS: usize = 200;
/// Relative tolerance used by [`DenseMatrix::step_norm`].
pub const NORM_TOL: f64 = 1e-8;
/// Inflation applied to the power-iteration estimate before it enters a step bound.
pub const NORM_INFLATION: f64 = 1.0 + 1e-6;

/// A dense real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(SfpError::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(SfpError::dim("matrix values", rows * cols, values.len()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SfpError::InvalidArgument(format!(
                "matrix entry ({}, {}) is not finite",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(SfpError::dim("matrix row", cols, bad.len()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut values = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            values[i * n + i] = *d;
        }
        Self {
            rows: n,
            cols: n,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    /// Returns `Ax`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(SfpError::dim("apply", self.cols, x.len()));
        }
        Ok(self.apply_unchecked(x))
    }

    /// Returns `Aᵗy`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(SfpError::dim("apply_transpose", self.rows, y.len()));
        }
        Ok(self.apply_transpose_unchecked(y))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.values
            .chunks_exact(self.cols)
            .map(|row| dot(row, x))
            .collect()
    }

    pub(crate) fn apply_transpose_unchecked(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (row, &yi) in self.values.chunks_exact(self.cols).zip(y) {
            if yi != 0.0 {
                axpy(yi, row, &mut out);
            }
        }
        out
    }

    /// Power iteration on `AᵗA` from the normalized all-ones vector.
    ///
    /// The Rayleigh quotient never exceeds the top eigenvalue, so the returned
    /// value is a lower bound on `‖A‖₂` up to rounding.
    pub fn op_norm_estimate(&self, max_iters: usize, tol: f64) -> Result<f64> {
        if max_iters == 0 {
            return Err(SfpError::InvalidArgument("max_iters must be >= 1".into()));
        }
        if !(tol > 0.0) {
            return Err(SfpError::InvalidArgument("tol must be positive".into()));
        }
        if self.values.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        let mut v = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        if norm2(&self.apply_unchecked(&v)) == 0.0 {
            // The all-ones direction lies in the null space; restart on the
            // heaviest column instead.
            let heaviest = (0..self.cols)
                .max_by(|&a, &b| {
                    let na: f64 = (0..self.rows).map(|i| self.get(i, a).powi(2)).sum();
                    let nb: f64 = (0..self.rows).map(|i| self.get(i, b).powi(2)).sum();
                    na.total_cmp(&nb)
                })
                .unwrap_or(0);
            v.iter_mut().for_each(|x| *x = 0.0);
            v[heaviest] = 1.0;
        }
        let mut sigma_sq = 0.0_f64;
        for _ in 0..max_iters {
            let av = self.apply_unchecked(&v);
            let rayleigh = dot(&av, &av);
            let w = self.apply_transpose_unchecked(&av);
            let wn = norm2(&w);
            let converged = (rayleigh - sigma_sq).abs() <= tol * rayleigh.max(f64::MIN_POSITIVE);
            sigma_sq = rayleigh;
            if wn == 0.0 || converged {
                break;
            }
            v = w.into_iter().map(|x| x / wn).collect();
        }
        Ok(sigma_sq.sqrt())
    }

    /// `‖A‖₂` estimate with the default budget and the safety inflation applied;
    /// this is the value every step-size bound uses.
    pub fn step_norm(&self) -> f64 {
        self.op_norm_estimate(NORM_MAX_ITERS, NORM_TOL)
            .expect("default power-iteration parameters are valid")
            * NORM_INFLATION
    }
}

/// Gradient of `½‖(I − P_Q)Ax‖²`, i.e. `Aᵗ(Ax − P_Q(Ax))`.
pub fn sfp_gradient(a: &DenseMatrix, q: &ClosedConvexSet, x: &[f64]) -> Result<Vec<f64>> {
    if q.dim() != a.rows() {
        return Err(SfpError::dim("sfp_gradient target set", a.rows(), q.dim()));
    }
    let ax = a.apply(x)?;
    Ok(a.apply_transpose_unchecked(&residual_from_image(q, &ax)))
}

/// `(I − P_Q)y`.
pub(crate) fn residual_from_image(q: &ClosedConvexSet, y: &[f64]) -> Vec<f64> {
    let p = q.project_unchecked(y);
    y.iter().zip(&p).map(|(a, b)| a - b).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `y ← y + alpha·x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
