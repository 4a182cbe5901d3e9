//! Proximal operators of `λ‖·‖₁` and of the nonconvex `λ(‖·‖₁ − ‖·‖₂)`.

use crate::error::{Result, SfpError};
use crate::linops::{norm1, norm2};

/// Strictly positive prox scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ProxParam(f64);

impl ProxParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(Self(lambda))
        } else {
            Err(SfpError::InvalidArgument(format!(
                "prox parameter must be finite and > 0, got {lambda}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `r(v) = ‖v‖₁ − ‖v‖₂`; nonnegative, zero exactly on 0 and 1-sparse vectors.
pub fn l1_minus_l2(v: &[f64]) -> f64 {
    norm1(v) - norm2(v)
}

/// Componentwise `sign(xᵢ)·max(|xᵢ| − λ, 0)`.
pub fn soft_threshold(x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(SfpError::InvalidArgument(format!(
            "soft-threshold level must be >= 0, got {lambda}"
        )));
    }
    Ok(shrink(x, lambda))
}

#[inline]
pub(crate) fn shrink(x: &[f64], lambda: f64) -> Vec<f64> {
    x.iter().map(|&v| shrink_scalar(v, lambda)).collect()
}

#[inline]
pub(crate) fn shrink_scalar(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// One element of `argmin_v λ(‖v‖₁ − ‖v‖₂) + ½‖v − y‖²`.
///
/// When `λ < ‖y‖∞` the minimizer is the soft-threshold of `y` stretched
/// outward by `(λ + ‖s‖₂)/‖s‖₂`. Otherwise the prox set consists of 1-sparse
/// vectors; the one returned sits at the lowest index attaining `‖y‖∞`, keeps
/// the sign of `y` there and has magnitude `‖y‖∞` (which equals `λ` in the
/// boundary case).
pub fn prox_l1_minus_l2(y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let lambda = ProxParam::new(lambda)?.get();
    Ok(prox_l1_minus_l2_unchecked(y, lambda))
}

pub(crate) fn prox_l1_minus_l2_unchecked(y: &[f64], lambda: f64) -> Vec<f64> {
    let (argmax, ymax) = y
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |(bi, bm), (i, v)| {
            if v.abs() > bm {
                (i, v.abs())
            } else {
                (bi, bm)
            }
        });
    let mut out = vec![0.0; y.len()];
    if ymax == 0.0 {
        return out;
    }
    if lambda < ymax {
        let s = shrink(y, lambda);
        let ns = norm2(&s);
        let scale = (lambda + ns) / ns;
        out.iter_mut().zip(&s).for_each(|(o, si)| *o = scale * si);
    } else {
        out[argmax] = y[argmax];
    }
    out
}
