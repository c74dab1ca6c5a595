mod common;

use std::fs;

use common::*;
use mlrssc::data::*;
use mlrssc::{Error, MultiViewDataset};
use ndarray::{s, Array2, Axis};

#[test]
fn synthetic_component_means_concentrate() {
    let d = generate_synthetic(7);
    let labels = d.labels.as_ref().unwrap();
    let idx: Vec<usize> = (0..1000).filter(|&i| labels[i] == 1).collect();
    let x = d.views[0].select(Axis(1), &idx);
    let mean = x.mean_axis(Axis(1)).unwrap();
    assert!((mean[0] - 1.0).abs() < 0.15 && (mean[1] - 1.0).abs() < 0.15);
    let y = d.views[1].select(Axis(1), &idx);
    let mean = y.mean_axis(Axis(1)).unwrap();
    assert!((mean[0] - 2.0).abs() < 0.15 && (mean[1] - 2.0).abs() < 0.15);
}

#[test]
fn synthetic_is_seeded() {
    assert_eq!(generate_synthetic(1), generate_synthetic(1));
    assert_ne!(generate_synthetic(1), generate_synthetic(2));
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = generate_synthetic(3).subset(&(0..50).collect::<Vec<_>>()).unwrap();
    let (views, labels) = save_dataset(dir.path(), &d).unwrap();
    let back = load_views(&views, labels.as_deref(), 2).unwrap();
    assert_eq!(back, d);
}

#[test]
fn parse_error_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("v.txt");
    let mut text = String::new();
    for i in 0..10 {
        if i == 6 {
            text.push_str("1.0 abc\n");
        } else {
            text.push_str("1.0 2.0\n");
        }
    }
    fs::write(&p, text).unwrap();
    match read_matrix(&p) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
        other => panic!("expected parse error, got {other:?}"),
    }
    fs::write(&p, "a,b\n1,2\n").unwrap();
    assert!(matches!(read_matrix(&p), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn mismatched_row_counts_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_matrix(&a, &Array2::ones((2, 100))).unwrap();
    write_matrix(&b, &Array2::ones((2, 99))).unwrap();
    assert!(matches!(load_views(&[a, b], None, 2), Err(Error::MismatchedColumns { .. })));
}

#[test]
fn whitespace_and_comma_delimiters() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("v.txt");
    fs::write(&p, "1 2\t3\n4,5,6\n\n").unwrap();
    let x = read_matrix(&p).unwrap();
    assert_eq!(x, ndarray::array![[1.0, 4.0], [2.0, 5.0], [3.0, 6.0]]);
}

#[test]
fn pca_keeps_enough_variance_and_decorrelates() {
    let x = gaussian(&mut rng(71), 20, 50);
    let y = pca_reduce(&x, 0.9).unwrap();
    let center = |m: &Array2<f64>| m - &m.mean_axis(Axis(1)).unwrap().insert_axis(Axis(1));
    let (xc, yc) = (center(&x), center(&y));
    let total = frob_sq(&xc);
    // Eigenvalues of the scatter matrix are the squared singular values.
    let mut ev: Vec<f64> = jacobi_svd(&xc.t().to_owned()).1.iter().map(|s| s * s).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let r = y.nrows();
    let kept: f64 = ev[..r].iter().sum();
    assert!(kept >= 0.9 * total);
    assert!(ev[..r - 1].iter().sum::<f64>() < 0.9 * total);
    assert!((frob_sq(&yc) - kept).abs() < 1e-8 * total);
    let cov = naive_matmul(&yc, &yc.t().to_owned());
    let scale = cov.diag().iter().cloned().fold(0.0, f64::max);
    for i in 0..r {
        for j in 0..r {
            if i != j {
                assert!(cov[[i, j]].abs() < 1e-8 * scale);
            }
        }
    }
}

#[test]
fn pca_full_fraction_gives_numerical_rank() {
    let mut r = rng(72);
    let x = naive_matmul(&gaussian(&mut r, 6, 3), &gaussian(&mut r, 3, 20));
    assert_eq!(pca_reduce(&x, 1.0).unwrap().nrows(), 3);
    assert!(matches!(pca_reduce(&Array2::ones((3, 5)), 0.9), Err(Error::DegenerateData(_))));
}

#[test]
fn concatenation_keeps_blocks() {
    let mut r = rng(73);
    let views = vec![gaussian(&mut r, 2, 10), gaussian(&mut r, 3, 10)];
    let d = MultiViewDataset::new(views.clone(), None, 2).unwrap();
    let c = concat_features(&d);
    assert_eq!(c.views[0].slice(s![..2, ..]), views[0]);
    assert_eq!(c.views[0].slice(s![2.., ..]), views[1]);
    let single = MultiViewDataset::new(vec![views[0].clone()], None, 2).unwrap();
    assert_eq!(concat_features(&single), single);
}
