//! Gram matrices for the kernelized solvers.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::config::KernelKind;
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub k: Array2<f64>,
    pub kind: KernelKind,
    pub sigma: Option<f64>,
}

/// `K = XᵀX`.
pub fn gram_linear(x: &Array2<f64>) -> GramMatrix {
    GramMatrix {
        k: linalg::gram(x.view()),
        kind: KernelKind::Linear,
        sigma: None,
    }
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Median Euclidean distance over all unordered pairs of columns.
pub fn median_pairwise_distance(x: &Array2<f64>) -> Result<f64> {
    let n = x.ncols();
    if n < 2 {
        return Err(Error::DegenerateData("median distance needs at least two points".into()));
    }
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d.push(sq_dist(x.column(i), x.column(j)).sqrt());
        }
    }
    d.sort_unstable_by(f64::total_cmp);
    let m = d.len();
    let median = if m % 2 == 1 {
        d[m / 2]
    } else {
        0.5 * (d[m / 2 - 1] + d[m / 2])
    };
    if d[m - 1] == 0.0 {
        return Err(Error::DegenerateData("all points coincide".into()));
    }
    Ok(median)
}

/// `K_ij = exp(−‖x_i − x_j‖² / 2σ²)`, built on the upper triangle and mirrored.
pub fn gram_gaussian(x: &Array2<f64>, sigma: f64) -> GramMatrix {
    debug_assert!(sigma > 0.0);
    let n = x.ncols();
    let denom = 2.0 * sigma * sigma;
    let mut k = Array2::zeros((n, n));
    for i in 0..n {
        k[[i, i]] = 1.0;
        for j in i + 1..n {
            let v = (-sq_dist(x.column(i), x.column(j)) / denom).exp();
            k[[i, j]] = v;
            k[[j, i]] = v;
        }
    }
    GramMatrix {
        k,
        kind: KernelKind::Gaussian,
        sigma: Some(sigma),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn linear_single_point() {
        assert_eq!(gram_linear(&array![[1.0], [2.0]]).k, array![[5.0]]);
    }

    #[test]
    fn median_examples() {
        assert_eq!(median_pairwise_distance(&array![[0.0, 3.0]]).unwrap(), 3.0);
        assert_eq!(median_pairwise_distance(&array![[0.0, 1.0, 3.0]]).unwrap(), 2.0);
        assert!(matches!(
            median_pairwise_distance(&array![[1.0, 1.0, 1.0]]),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn gaussian_at_sigma_root_two() {
        let sigma = 0.7;
        let x = array![[0.0, sigma * 2f64.sqrt()]];
        let g = gram_gaussian(&x, sigma);
        assert!((g.k[[0, 1]] - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(g.k[[0, 0]], 1.0);
        assert_eq!(g.k[[0, 1]], g.k[[1, 0]]);
    }

    #[test]
    fn gaussian_wide_bandwidth_is_all_ones() {
        let x = array![[0.0, 1.0, -2.0], [0.5, 0.0, 3.0]];
        let g = gram_gaussian(&x, 1e9);
        assert!(g.k.iter().all(|v| (v - 1.0).abs() < 1e-6));
    }
}
