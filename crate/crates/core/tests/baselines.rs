mod common;

use common::*;
use mlrssc::baselines::{lrr_exact, lrr_noisy};
use ndarray::Array2;
use rand::Rng;

fn noisy_objective(x: &Array2<f64>, c: &Array2<f64>, lambda: f64) -> f64 {
    oracle_nuclear_norm(c) + 0.5 * lambda * frob_sq(&(x - &naive_matmul(x, c)))
}

#[test]
fn exact_solution_self_expresses_and_projects() {
    let mut r = rng(21);
    for _ in 0..20 {
        let (d, n) = (r.random_range(2..6), r.random_range(6..10));
        let x = gaussian(&mut r, d, n);
        let c = lrr_exact(&x).unwrap();
        assert!(max_abs_diff(&naive_matmul(&x, &c), &x) < 1e-8);
        assert!(max_abs_diff(&naive_matmul(&c, &c), &c) < 1e-8);
        assert!(max_abs_diff(&c, &c.t().to_owned()) < 1e-12);
    }
}

#[test]
fn exact_random_4x8_residual() {
    let x = gaussian(&mut rng(22), 4, 8);
    let c = lrr_exact(&x).unwrap();
    assert!(frob_sq(&(&x - &naive_matmul(&x, &c))).sqrt() < 1e-8);
}

#[test]
fn noisy_solution_beats_random_perturbations() {
    let mut r = rng(23);
    for _ in 0..20 {
        let x = gaussian(&mut r, 5, 10);
        let lambda = 10.0;
        let c = lrr_noisy(&x, lambda).unwrap();
        let best = noisy_objective(&x, &c, lambda);
        for _ in 0..1000 {
            let scale = 10f64.powi(r.random_range(-4..1));
            let p = gaussian(&mut r, 10, 10) * scale;
            assert!(best <= noisy_objective(&x, &(&c + &p), lambda) + 1e-10);
        }
    }
}

#[test]
fn noisy_approaches_exact_for_large_lambda() {
    let mut r = rng(24);
    for _ in 0..5 {
        let x = gaussian(&mut r, 4, 7);
        let diff = max_abs_diff(&lrr_noisy(&x, 1e12).unwrap(), &lrr_exact(&x).unwrap());
        assert!(diff < 1e-6, "difference {diff}");
    }
}
