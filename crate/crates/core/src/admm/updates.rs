//! Closed-form ADMM sub-steps for one view.

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use super::{AdmmViewState, PenaltyState};
use crate::error::{Error, Result};
use crate::linalg;
use crate::prox::{self, shrink};

/// Solves `[c·G + (μ2+μ3+μ4)·I] A = rhs` with a Cholesky factorization.
pub(crate) fn solve_shifted(gram: &Array2<f64>, scale: f64, shift: f64, rhs: &Array2<f64>) -> Result<Array2<f64>> {
    if !(shift > 0.0) {
        return Err(Error::SingularSystem);
    }
    let mut m = gram * scale;
    m.diag_mut().mapv_inplace(|d| d + shift);
    linalg::spd_solve(m.view(), rhs.view())
}

/// `μ2 C2 + μ3 C1 + μ4 C3 − Λ2 − Λ3 − Λ4`, shared by all A-updates.
fn coupling_rhs(view: &AdmmViewState, p: &PenaltyState) -> Array2<f64> {
    let mut rhs = Array2::zeros(view.a.raw_dim());
    Zip::from(&mut rhs)
        .and(&view.c1)
        .and(&view.c2)
        .and(&view.c3)
        .for_each(|r, &c1, &c2, &c3| *r = p.mu2 * c2 + p.mu3 * c1 + p.mu4 * c3);
    Zip::from(&mut rhs)
        .and(&view.l2)
        .and(&view.l3)
        .and(&view.l4)
        .for_each(|r, &l2, &l3, &l4| *r -= l2 + l3 + l4);
    rhs
}

pub(crate) fn a_exact_with_gram(
    view: &AdmmViewState,
    x: &Array2<f64>,
    xtx: &Array2<f64>,
    p: &PenaltyState,
) -> Result<Array2<f64>> {
    let l1 = view
        .l1
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("exact update needs the Λ1 multiplier".into()))?;
    let mut rhs = coupling_rhs(view, p);
    rhs.scaled_add(p.mu1, xtx);
    rhs += &linalg::matmul(x.t(), l1.view());
    solve_shifted(xtx, p.mu1, p.mu2 + p.mu3 + p.mu4, &rhs)
}

/// A-update under the hard constraint `X = XA`:
/// `[μ1 XᵀX + (μ2+μ3+μ4) I] A = μ1 XᵀX + μ2 C2 + μ3 C1 + μ4 C3 + XᵀΛ1 − Λ2 − Λ3 − Λ4`.
pub fn update_a_exact(view: &AdmmViewState, x: &Array2<f64>, penalties: &PenaltyState) -> Result<Array2<f64>> {
    let xtx = linalg::gram(x.view());
    a_exact_with_gram(view, x, &xtx, penalties)
}

/// A-update under the squared-error fidelity, with `gram = XᵀX` or a kernel
/// Gram matrix: `[G + (μ2+μ3+μ4) I] A = G + μ2 C2 + μ3 C1 + μ4 C3 − Λ2 − Λ3 − Λ4`.
pub fn update_a_noisy(view: &AdmmViewState, gram: &Array2<f64>, penalties: &PenaltyState) -> Result<Array2<f64>> {
    let mut rhs = coupling_rhs(view, penalties);
    rhs += gram;
    solve_shifted(gram, 1.0, penalties.mu2 + penalties.mu3 + penalties.mu4, &rhs)
}

/// `C1 = svt(A + Λ3/μ3, β1/μ3)`.
pub fn update_c1(a: &Array2<f64>, l3: &Array2<f64>, beta1: f64, mu3: f64) -> Result<Array2<f64>> {
    let y = a + &(l3 / mu3);
    prox::svt(&y, beta1 / mu3)
}

/// `C2 = soft_threshold(A + Λ2/μ2, β2/μ2)` with the diagonal zeroed.
pub fn update_c2(a: &Array2<f64>, l2: &Array2<f64>, beta2: f64, mu2: f64) -> Array2<f64> {
    let tau = beta2 / mu2;
    let mut c2 = Array2::zeros(a.raw_dim());
    Zip::from(&mut c2)
        .and(a)
        .and(l2)
        .for_each(|c, &a, &l| *c = shrink(a + l / mu2, tau));
    c2.diag_mut().fill(0.0);
    c2
}

/// Pairwise consensus step:
/// `C3 = [2λ(n_v−1) + μ4]⁻¹ (2λ Σ_w C^(w) + μ4 A + Λ4)` over the other views.
pub fn update_c3_pairwise(
    a: &Array2<f64>,
    l4: &Array2<f64>,
    others: &[&Array2<f64>],
    lambda_v: f64,
    mu4: f64,
) -> Array2<f64> {
    let mut sum = Array2::zeros(a.raw_dim());
    for c in others {
        sum += *c;
    }
    c3_pairwise_from_sum(a, l4, &sum, others.len(), lambda_v, mu4)
}

pub(crate) fn c3_pairwise_from_sum(
    a: &Array2<f64>,
    l4: &Array2<f64>,
    others_sum: &Array2<f64>,
    n_others: usize,
    lambda_v: f64,
    mu4: f64,
) -> Array2<f64> {
    let denom = 2.0 * lambda_v * n_others as f64 + mu4;
    let mut c3 = Array2::zeros(a.raw_dim());
    Zip::from(&mut c3)
        .and(a)
        .and(l4)
        .and(others_sum)
        .for_each(|c, &a, &l, &s| *c = (2.0 * lambda_v * s + mu4 * a + l) / denom);
    c3
}

/// Centroid consensus step: `C3 = (2λ + μ4)⁻¹ (2λ C* + μ4 A + Λ4)`.
pub fn update_c3_centroid(
    a: &Array2<f64>,
    l4: &Array2<f64>,
    centroid: &Array2<f64>,
    lambda_v: f64,
    mu4: f64,
) -> Array2<f64> {
    c3_pairwise_from_sum(a, l4, centroid, 1, lambda_v, mu4)
}

/// `C* = Σ λ_v C^(v) / Σ λ_v`.
pub fn update_centroid(c3_views: &[&Array2<f64>], lambdas: &[f64]) -> Result<Array2<f64>> {
    assert_eq!(c3_views.len(), lambdas.len());
    let total: f64 = lambdas.iter().sum();
    if !(total > 0.0) {
        return Err(Error::AllZeroLambda);
    }
    let mut out = Array2::zeros(c3_views[0].raw_dim());
    for (c, &l) in c3_views.iter().zip(lambdas) {
        if l != 0.0 {
            out.scaled_add(l / total, *c);
        }
    }
    Ok(out)
}

/// Dual ascent with the current penalties. `x` is required iff the view
/// carries the exact-constraint multiplier Λ1.
pub fn update_duals(view: &mut AdmmViewState, x: Option<&Array2<f64>>, penalties: &PenaltyState) {
    if let (Some(l1), Some(x)) = (view.l1.as_mut(), x) {
        let xa = linalg::matmul(x.view(), view.a.view());
        Zip::from(l1)
            .and(x)
            .and(&xa)
            .for_each(|l, &x, &xa| *l += penalties.mu1 * (x - xa));
    }
    Zip::from(&mut view.l2)
        .and(&view.a)
        .and(&view.c2)
        .for_each(|l, &a, &c| *l += penalties.mu2 * (a - c));
    Zip::from(&mut view.l3)
        .and(&view.a)
        .and(&view.c1)
        .for_each(|l, &a, &c| *l += penalties.mu3 * (a - c));
    Zip::from(&mut view.l4)
        .and(&view.a)
        .and(&view.c3)
        .for_each(|l, &a, &c| *l += penalties.mu4 * (a - c));
}

/// The four per-view primal residuals, in infinity norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewResiduals {
    /// `‖A − C1‖_∞`
    pub a_c1: f64,
    /// `‖A − C2‖_∞`
    pub a_c2: f64,
    /// `‖A − C3‖_∞`
    pub a_c3: f64,
    /// `‖A_k − A_{k−1}‖_∞`
    pub a_step: f64,
}

impl ViewResiduals {
    pub fn max(&self) -> f64 {
        self.a_c1.max(self.a_c2).max(self.a_c3).max(self.a_step)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a_c1, self.a_c2, self.a_c3, self.a_step]
    }
}

pub(crate) fn view_residuals(view: &AdmmViewState, previous_a: &Array2<f64>) -> ViewResiduals {
    ViewResiduals {
        a_c1: linalg::inf_norm_diff(view.a.view(), view.c1.view()),
        a_c2: linalg::inf_norm_diff(view.a.view(), view.c2.view()),
        a_c3: linalg::inf_norm_diff(view.a.view(), view.c3.view()),
        a_step: linalg::inf_norm_diff(view.a.view(), previous_a.view()),
    }
}

/// Converged iff every residual of every view is at most `epsilon`.
pub fn check_convergence(
    views: &[AdmmViewState],
    previous_a: &[Array2<f64>],
    epsilon: f64,
) -> (bool, Vec<ViewResiduals>) {
    let residuals: Vec<_> = views
        .iter()
        .zip(previous_a)
        .map(|(v, a)| view_residuals(v, a))
        .collect();
    let converged = residuals.iter().all(|r| r.max() <= epsilon);
    (converged, residuals)
}
