use ndarray::{Array2, Zip};

use super::SolveInput;
use crate::config::{Mode, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg;
use crate::prox;

/// `½‖X − XC‖²_F` computed directly.
pub fn linear_fidelity(x: &Array2<f64>, c: &Array2<f64>) -> f64 {
    let xc = linalg::matmul(x.view(), c.view());
    0.5 * Zip::from(x).and(&xc).fold(0.0, |acc, &a, &b| acc + (a - b) * (a - b))
}

/// `½[tr(K) − 2 tr(KC) + tr(CᵀKC)]` for a symmetric Gram matrix `K`.
pub fn kernel_fidelity(k: &Array2<f64>, c: &Array2<f64>) -> f64 {
    let trace_k = k.diag().sum();
    let trace_kc = Zip::from(k).and(c).fold(0.0, |acc, &k, &c| acc + k * c);
    let kc = linalg::matmul(k.view(), c.view());
    let trace_ckc = Zip::from(c).and(&kc).fold(0.0, |acc, &c, &kc| acc + c * kc);
    0.5 * (trace_k - 2.0 * trace_kc + trace_ckc)
}

fn sq_dist(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    Zip::from(a).and(b).fold(0.0, |acc, &x, &y| acc + (x - y) * (x - y))
}

/// Consensus penalty: pairwise sums over ordered pairs `v ≠ w`, centroid
/// mode measures each view against `centroid`. Zero for a single view.
pub fn consensus_penalty(reps: &[&Array2<f64>], centroid: Option<&Array2<f64>>, lambdas: &[f64], mode: Mode) -> f64 {
    if reps.len() < 2 {
        return 0.0;
    }
    match mode {
        Mode::SingleView => 0.0,
        Mode::Pairwise => {
            let mut total = 0.0;
            for (v, cv) in reps.iter().enumerate() {
                for (w, cw) in reps.iter().enumerate() {
                    if v != w {
                        total += lambdas[v] * sq_dist(cv, cw);
                    }
                }
            }
            total
        }
        Mode::Centroid => match centroid {
            Some(c) => reps
                .iter()
                .zip(lambdas)
                .map(|(cv, l)| l * sq_dist(cv, c))
                .sum(),
            None => 0.0,
        },
    }
}

/// Per-view fidelity, nuclear and L1 terms plus the consensus penalty.
///
/// The fidelity term is `½‖X − XC‖²` for linear input and its Gram form for
/// kernel input. `nuclear_norms` may carry precomputed `‖C^(v)‖_*` values.
pub(crate) fn objective_with_norms(
    reps: &[&Array2<f64>],
    nuclear_norms: Option<&[f64]>,
    centroid: Option<&Array2<f64>>,
    input: &SolveInput,
    config: &SolverConfig,
) -> Result<f64> {
    let lambdas = config.lambdas(reps.len())?;
    let mut total = 0.0;
    for (v, c) in reps.iter().enumerate() {
        let fidelity = match input {
            SolveInput::Linear(xs) => linear_fidelity(&xs[v], c),
            SolveInput::Kernel(ks) => kernel_fidelity(&ks[v], c),
        };
        let nuclear = match nuclear_norms {
            Some(norms) => norms[v],
            None => prox::nuclear_norm(c)?,
        };
        let l1 = c.iter().map(|x| x.abs()).sum::<f64>();
        total += fidelity + config.beta1 * nuclear + config.beta2 * l1;
    }
    Ok(total + consensus_penalty(reps, centroid, &lambdas, config.mode))
}

/// Objective value at the given per-view representations.
pub fn evaluate_objective(
    reps: &[Array2<f64>],
    centroid: Option<&Array2<f64>>,
    input: &SolveInput,
    config: &SolverConfig,
) -> Result<f64> {
    if reps.len() != input.n_views() {
        return Err(Error::InvalidConfig(format!(
            "{} representations for {} views",
            reps.len(),
            input.n_views()
        )));
    }
    let refs: Vec<&Array2<f64>> = reps.iter().collect();
    objective_with_norms(&refs, None, centroid, input, config)
}
