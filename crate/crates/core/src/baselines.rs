//! Closed-form low-rank representation solutions.

use ndarray::{s, Array2, Axis};

use crate::error::Result;
use crate::{linalg, prox};

/// Minimum nuclear-norm solution of `X = XC`: `V Vᵀ` from the skinny SVD of `X`.
pub fn lrr_exact(x: &Array2<f64>) -> Result<Array2<f64>> {
    let svd = prox::skinny_svd(x)?;
    Ok(linalg::matmul(svd.v.view(), svd.v.t()))
}

/// Minimizer of `‖C‖_* + (λ/2)‖X − XC‖²_F`:
/// `V₁ (I − λ⁻¹ Σ₁⁻²) V₁ᵀ` over the singular values `σ > 1/√λ`.
pub fn lrr_noisy(x: &Array2<f64>, lambda: f64) -> Result<Array2<f64>> {
    debug_assert!(lambda > 0.0);
    let svd = linalg::thin_svd(x.view())?;
    let cut = 1.0 / lambda.sqrt();
    let r = svd.s.iter().take_while(|&&s| s > cut).count();
    let n = x.ncols();
    if r == 0 {
        return Ok(Array2::zeros((n, n)));
    }
    let v1 = svd.v.slice(s![.., ..r]);
    let w = svd.s.slice(s![..r]).mapv(|s| 1.0 - 1.0 / (lambda * s * s));
    let vw = &v1 * &w.view().insert_axis(Axis(0));
    Ok(linalg::matmul(vw.view(), v1.t()))
}
