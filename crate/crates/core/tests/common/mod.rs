//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.sample::<f64, _>(StandardNormal))
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn frob_sq(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// Triple-loop product.
pub fn naive_matmul(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (m, k) = a.dim();
    let n = b.ncols();
    let mut c = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            let mut s = 0.0;
            for t in 0..k {
                s += a[[i, t]] * b[[t, j]];
            }
            c[[i, j]] = s;
        }
    }
    c
}

/// One-sided Jacobi SVD: returns `W = A·V` (columns are `σᵢ uᵢ`), the
/// singular values and `V`.
pub fn jacobi_svd(a: &Array2<f64>) -> (Array2<f64>, Array1<f64>, Array2<f64>) {
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w.column(p).iter().map(|x| x * x).sum();
                let beta: f64 = w.column(q).iter().map(|x| x * x).sum();
                let gamma: f64 = w.column(p).iter().zip(w.column(q)).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut w, &mut v] {
                    for i in 0..m.nrows() {
                        let (x, y) = (m[[i, p]], m[[i, q]]);
                        m[[i, p]] = c * x - s * y;
                        m[[i, q]] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s = Array1::from_shape_fn(n, |j| w.column(j).iter().map(|x| x * x).sum::<f64>().sqrt());
    (w, s, v)
}

pub fn oracle_nuclear_norm(a: &Array2<f64>) -> f64 {
    jacobi_svd(a).1.sum()
}

/// `Σ (1 − τ/σᵢ)₊ (A vᵢ) vᵢᵀ`.
pub fn oracle_svt(a: &Array2<f64>, tau: f64) -> Array2<f64> {
    let (w, s, v) = jacobi_svd(a);
    let mut out = Array2::zeros(a.dim());
    for j in 0..s.len() {
        if s[j] > tau {
            let f = 1.0 - tau / s[j];
            for r in 0..out.nrows() {
                for c in 0..out.ncols() {
                    out[[r, c]] += f * w[[r, j]] * v[[c, j]];
                }
            }
        }
    }
    out
}

pub fn oracle_soft_threshold(a: &Array2<f64>, tau: f64) -> Array2<f64> {
    a.mapv(|x| {
        if x.abs() <= tau {
            0.0
        } else if x > 0.0 {
            x - tau
        } else {
            x + tau
        }
    })
}

/// Pair counts by enumerating every unordered pair.
pub fn oracle_pairs(truth: &[usize], pred: &[usize]) -> (u64, u64, u64, u64) {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for i in 0..truth.len() {
        for j in i + 1..truth.len() {
            match (truth[i] == truth[j], pred[i] == pred[j]) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
    }
    (tp, fp, fn_, tn)
}

fn div_or_zero(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn oracle_precision_recall_f(truth: &[usize], pred: &[usize]) -> (f64, f64, f64) {
    let (tp, fp, fn_, _) = oracle_pairs(truth, pred);
    (
        div_or_zero(tp, tp + fp),
        div_or_zero(tp, tp + fn_),
        div_or_zero(2 * tp, 2 * tp + fp + fn_),
    )
}

/// Adjusted Rand index from pair counts as a single rational.
pub fn oracle_ari(truth: &[usize], pred: &[usize]) -> f64 {
    let (tp, fp, fn_, tn) = oracle_pairs(truth, pred);
    let (tp, fp, fn_, tn) = (tp as i128, fp as i128, fn_ as i128, tn as i128);
    let num = 2 * (tp * tn - fn_ * fp);
    let den = (tp + fn_) * (fn_ + tn) + (tp + fp) * (fp + tn);
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// NMI from explicit probability sums over label values.
pub fn oracle_nmi(truth: &[usize], pred: &[usize]) -> f64 {
    let n = truth.len() as f64;
    let mut tvals: Vec<usize> = truth.to_vec();
    tvals.sort();
    tvals.dedup();
    let mut pvals: Vec<usize> = pred.to_vec();
    pvals.sort();
    pvals.dedup();
    let count = |f: &dyn Fn(usize) -> bool| (0..truth.len()).filter(|&i| f(i)).count() as f64;
    let h = |vals: &[usize], labels: &[usize]| -> f64 {
        vals.iter()
            .map(|&v| {
                let p = count(&|i| labels[i] == v) / n;
                -p * p.ln()
            })
            .sum()
    };
    let hu = h(&tvals, truth);
    let hv = h(&pvals, pred);
    if hu + hv == 0.0 {
        return 0.0;
    }
    let mut mi = 0.0;
    for &a in &tvals {
        for &b in &pvals {
            let pab = count(&|i| truth[i] == a && pred[i] == b) / n;
            if pab > 0.0 {
                let pa = count(&|i| truth[i] == a) / n;
                let pb = count(&|i| pred[i] == b) / n;
                mi += pab * (pab / (pa * pb)).ln();
            }
        }
    }
    mi / ((hu + hv) / 2.0)
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(1..=k)).collect()
}
