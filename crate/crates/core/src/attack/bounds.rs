//! Numerical check of the linear-projection attack bounds.
//!
//! Features are row vectors and a projection scheme maps `x ↦ xW` with `W`
//! of shape `n × l`. Given a pre-image `x̂` fitted to `x0` under `W_C`
//! (`ε = ‖(x̂ − x0)W_C‖`) and a fresh sample `x1 = x0 + δ`:
//!
//! ```text
//! ‖(x̂ − x1)W_C‖ ≤ ε + M‖δ‖
//! ‖(x̂ − x1)W_T‖ ≤ M(ε + M‖δ‖)
//! ```
//!
//! where `W_T = W_C W_Δ` and `M` bounds the spectral norms of `W_C`, `W_T`
//! and `W_Δ`. The second line needs `W_T` to factor through `W_C`, i.e. the
//! column space of `W_T` must lie in that of `W_C`; this holds when `W_C` has
//! full row rank and is checked numerically.

use nalgebra::{DMatrix, RowDVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::SchemeKey;

const FACTOR_TOLERANCE: f64 = 1e-8;
/// Slack for rounding in the inequality comparisons.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub epsilon: f64,
    pub delta_norm: f64,
    pub norm_c: f64,
    pub norm_t: f64,
    pub norm_delta_map: f64,
    pub m: f64,
    /// `‖(x̂ − x1)W_C‖` and `ε + M‖δ‖`.
    pub compromised_lhs: f64,
    pub compromised_rhs: f64,
    /// `‖(x̂ − x1)W_T‖` and `M(ε + M‖δ‖)`.
    pub target_lhs: f64,
    pub target_rhs: f64,
    /// `‖W_C W_Δ − W_T‖` relative to `‖W_T‖`.
    pub factor_residual: f64,
}

impl BoundReport {
    pub fn compromised_holds(&self) -> bool {
        self.compromised_lhs <= self.compromised_rhs * (1.0 + BOUND_SLACK) + BOUND_SLACK
    }

    pub fn target_holds(&self) -> bool {
        self.target_lhs <= self.target_rhs * (1.0 + BOUND_SLACK) + BOUND_SLACK
    }

    pub fn holds(&self) -> bool {
        self.compromised_holds() && self.target_holds()
    }
}

pub fn spectral_norm(w: &DMatrix<f64>) -> f64 {
    w.singular_values().max()
}

/// `n × l` projection matrix of a linear scheme. BioHashing is linear up to
/// its final thresholding; every other scheme is rejected.
pub fn linear_map(key: &SchemeKey) -> Result<DMatrix<f64>> {
    match key {
        SchemeKey::BioHash(k) => Ok(DMatrix::from_fn(k.n, k.l, |i, j| k.basis[j][i])),
        other => Err(Error::UnsupportedScheme {
            scheme: other.kind().name(),
            operation: "projection bounds",
        }),
    }
}

pub fn check_projection_bound_keys(x_hat: &[f64], x0: &[f64], x1: &[f64], sys_c: &SchemeKey, sys_t: &SchemeKey) -> Result<BoundReport> {
    check_projection_bound(x_hat, x0, x1, &linear_map(sys_c)?, &linear_map(sys_t)?)
}

pub fn check_projection_bound(x_hat: &[f64], x0: &[f64], x1: &[f64], w_c: &DMatrix<f64>, w_t: &DMatrix<f64>) -> Result<BoundReport> {
    let n = w_c.nrows();
    if w_t.nrows() != n {
        return Err(Error::Dimension { expected: n, actual: w_t.nrows() });
    }
    for v in [x_hat, x0, x1] {
        if v.len() != n {
            return Err(Error::Dimension { expected: n, actual: v.len() });
        }
    }
    let row = |v: &[f64]| RowDVector::from_row_slice(v);
    let (x_hat, x0, x1) = (row(x_hat), row(x0), row(x1));

    let pinv = w_c
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::param("w_c", e.to_string()))?;
    let w_delta = pinv * w_t;
    let norm_t = spectral_norm(w_t);
    let factor_residual = (w_c * &w_delta - w_t).norm() / norm_t.max(f64::MIN_POSITIVE);
    if factor_residual > FACTOR_TOLERANCE {
        return Err(Error::param(
            "w_t",
            format!("target map does not factor through the compromised map (residual {factor_residual:.3e})"),
        ));
    }

    let norm_c = spectral_norm(w_c);
    let norm_delta_map = spectral_norm(&w_delta);
    let m = norm_c.max(norm_t).max(norm_delta_map);
    let epsilon = ((&x_hat - &x0) * w_c).norm();
    let delta_norm = (&x1 - &x0).norm();
    let compromised_rhs = epsilon + m * delta_norm;

    Ok(BoundReport {
        epsilon,
        delta_norm,
        norm_c,
        norm_t,
        norm_delta_map,
        m,
        compromised_lhs: ((&x_hat - &x1) * w_c).norm(),
        compromised_rhs,
        target_lhs: ((&x_hat - &x1) * w_t).norm(),
        target_rhs: m * compromised_rhs,
        factor_residual,
    })
}
