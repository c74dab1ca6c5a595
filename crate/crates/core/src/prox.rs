//! Proximal operators of the L1 and nuclear norms.

use ndarray::{Array1, Array2, Axis};

use crate::error::Result;
use crate::linalg;

/// Relative cutoff below which singular values are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Entry-wise shrinkage `(|x| − τ)₊ · sgn(x)`, the prox of `τ‖·‖₁`.
pub fn soft_threshold(m: &Array2<f64>, tau: f64) -> Array2<f64> {
    debug_assert!(tau >= 0.0);
    m.mapv(|x| shrink(x, tau))
}

#[inline]
pub(crate) fn shrink(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// SVD restricted to the strictly positive singular values.
#[derive(Debug, Clone)]
pub struct SkinnySvd {
    /// `D × r`, orthonormal columns.
    pub u: Array2<f64>,
    /// `r` singular values, nonincreasing.
    pub s: Array1<f64>,
    /// `N × r`, orthonormal columns.
    pub v: Array2<f64>,
}

impl SkinnySvd {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// `U · diag(S) · Vᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let us = &self.u * &self.s.view().insert_axis(Axis(0));
        linalg::matmul(us.view(), self.v.t())
    }
}

/// Skinny SVD; singular values below `1e-12 · max(S)` are dropped.
pub fn skinny_svd(m: &Array2<f64>) -> Result<SkinnySvd> {
    let svd = linalg::thin_svd(m.view())?;
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let r = svd
        .s
        .iter()
        .take_while(|&&s| s > 0.0 && s > RANK_TOLERANCE * smax)
        .count();
    Ok(SkinnySvd {
        u: svd.u.slice_move(ndarray::s![.., ..r]),
        s: svd.s.slice_move(ndarray::s![..r]),
        v: svd.v.slice_move(ndarray::s![.., ..r]),
    })
}

/// Singular value thresholding, the prox of `τ‖·‖_*`.
///
/// Returns `U · (S − τ)₊ · Vᵀ`; the result has rank `#{σᵢ > τ}`.
pub fn svt(m: &Array2<f64>, tau: f64) -> Result<Array2<f64>> {
    debug_assert!(tau >= 0.0);
    let svd = linalg::thin_svd(m.view())?;
    let r = svd.s.iter().take_while(|&&s| s > tau).count();
    if r == 0 {
        return Ok(Array2::zeros(m.raw_dim()));
    }
    let shrunk = svd.s.slice(ndarray::s![..r]).mapv(|s| s - tau);
    let us = &svd.u.slice(ndarray::s![.., ..r]) * &shrunk.view().insert_axis(Axis(0));
    Ok(linalg::matmul(us.view(), svd.v.slice(ndarray::s![.., ..r]).t()))
}

/// Sum of singular values.
pub fn nuclear_norm(m: &Array2<f64>) -> Result<f64> {
    Ok(linalg::singular_values(m.view())?.iter().sum())
}
