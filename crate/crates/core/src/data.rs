//! Synthetic benchmark data, text-file ingestion, PCA and feature concatenation.
//!
//! View files are delimited numeric text (comma or whitespace), one row per
//! sample. Label files hold one integer per line.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{s, Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::linalg;

/// Two-dimensional Gaussian mixture shared by several views.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_points: usize,
    /// `means[v][c]`: mean of component `c` in view `v`.
    pub means: Vec<Vec<[f64; 2]>>,
    /// `covariances[v][c]`: covariance of component `c` in view `v`.
    pub covariances: Vec<Vec<[[f64; 2]; 2]>>,
    pub mixing: Vec<f64>,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The two-view, two-component benchmark with 1000 points.
    pub fn reference(seed: u64) -> Self {
        let m1 = [1.0, 1.0];
        let s1 = [[1.0, 0.5], [0.5, 1.5]];
        let m2 = [2.0, 2.0];
        let s2 = [[0.3, 0.0], [0.0, 0.6]];
        SyntheticSpec {
            n_points: 1000,
            means: vec![vec![m1, m2], vec![m2, m1]],
            covariances: vec![vec![s1, s2], vec![s2, s1]],
            mixing: vec![0.5, 0.5],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.mixing.len();
        let total: f64 = self.mixing.iter().sum();
        if k == 0 || (total - 1.0).abs() > 1e-9 || self.mixing.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidConfig("mixing proportions must sum to 1".into()));
        }
        if self.means.len() != self.covariances.len()
            || self.means.iter().any(|m| m.len() != k)
            || self.covariances.iter().any(|c| c.len() != k)
        {
            return Err(Error::InvalidConfig("one mean and covariance per view and component".into()));
        }
        for c in self.covariances.iter().flatten() {
            if c[0][1] != c[1][0] || cholesky2(c).is_none() {
                return Err(Error::InvalidConfig(format!("covariance {c:?} is not SPD")));
            }
        }
        Ok(())
    }
}

fn cholesky2(c: &[[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    if !(c[0][0] > 0.0) {
        return None;
    }
    let l00 = c[0][0].sqrt();
    let l10 = c[1][0] / l00;
    let r = c[1][1] - l10 * l10;
    if !(r > 0.0) {
        return None;
    }
    Some([[l00, 0.0], [l10, r.sqrt()]])
}

/// Samples a mixture dataset. Component sizes follow the mixing proportions
/// (rounded, remainder to the last component) and labels are shuffled.
pub fn generate_from_spec(spec: &SyntheticSpec) -> Result<MultiViewDataset> {
    spec.validate()?;
    let k = spec.mixing.len();
    let n = spec.n_points;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut labels = Vec::with_capacity(n);
    for (c, p) in spec.mixing.iter().enumerate() {
        let size = if c + 1 == k {
            n - labels.len()
        } else {
            (p * n as f64).round() as usize
        };
        labels.extend(std::iter::repeat_n(c + 1, size));
    }
    labels.shuffle(&mut rng);
    let views = spec
        .means
        .iter()
        .zip(&spec.covariances)
        .map(|(means, covs)| {
            let chol: Vec<_> = covs.iter().map(|c| cholesky2(c).unwrap()).collect();
            let mut x = Array2::zeros((2, n));
            for (i, &l) in labels.iter().enumerate() {
                let z0: f64 = rng.sample(StandardNormal);
                let z1: f64 = rng.sample(StandardNormal);
                let (m, f) = (means[l - 1], chol[l - 1]);
                x[[0, i]] = m[0] + f[0][0] * z0;
                x[[1, i]] = m[1] + f[1][0] * z0 + f[1][1] * z1;
            }
            x
        })
        .collect();
    MultiViewDataset::new(views, Some(labels), k)
}

/// The two-view Gaussian mixture benchmark: 1000 points, 500 per component.
pub fn generate_synthetic(seed: u64) -> MultiViewDataset {
    generate_from_spec(&SyntheticSpec::reference(seed)).expect("reference spec is valid")
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads a delimited matrix, rows = samples, and returns it as `D × N`.
pub fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| parse_error(path, i + 1, format!("non-numeric token {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_error(
                    path,
                    i + 1,
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(path, 0, "no data rows"));
    }
    let (n, d) = (rows.len(), rows[0].len());
    Ok(Array2::from_shape_fn((d, n), |(f, p)| rows[p][f]))
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<usize>()
                .map_err(|_| parse_error(path, i + 1, format!("invalid label {:?}", l.trim())))
        })
        .collect()
}

/// Loads one file per view plus optional labels.
pub fn load_views(view_paths: &[PathBuf], labels_path: Option<&Path>, k: usize) -> Result<MultiViewDataset> {
    let views = view_paths.iter().map(|p| read_matrix(p)).collect::<Result<Vec<_>>>()?;
    let labels = labels_path.map(read_labels).transpose()?;
    MultiViewDataset::new(views, labels, k)
}

/// Writes `x` (`D × N`) as comma-separated rows of samples. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_matrix(path: &Path, x: &Array2<f64>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for p in x.columns() {
        let line: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(",")).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = String::with_capacity(labels.len() * 2);
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes `view1.csv`, `view2.csv`, … and `labels.txt` (when present) into
/// `dir`, returning the view paths and the labels path.
pub fn save_dataset(dir: &Path, d: &MultiViewDataset) -> Result<(Vec<PathBuf>, Option<PathBuf>)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for (v, x) in d.views.iter().enumerate() {
        let p = dir.join(format!("view{}.csv", v + 1));
        write_matrix(&p, x)?;
        paths.push(p);
    }
    let labels = match &d.labels {
        Some(l) => {
            let p = dir.join("labels.txt");
            write_labels(&p, l)?;
            Some(p)
        }
        None => None,
    };
    Ok((paths, labels))
}

/// Projects centered data onto the fewest principal directions explaining at
/// least `variance_fraction` of the total variance. Returns `r × N`.
pub fn pca_reduce(x: &Array2<f64>, variance_fraction: f64) -> Result<Array2<f64>> {
    if !(variance_fraction > 0.0 && variance_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "variance fraction must lie in (0, 1], got {variance_fraction}"
        )));
    }
    if x.ncols() < 2 {
        return Err(Error::DegenerateData("PCA needs at least two points".into()));
    }
    let mean: Array1<f64> = x.mean_axis(Axis(1)).unwrap();
    let centered = x - &mean.insert_axis(Axis(1));
    let svd = linalg::thin_svd(centered.view())?;
    let var: Vec<f64> = svd.s.iter().map(|s| s * s).collect();
    let total: f64 = var.iter().sum();
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let rank = svd.s.iter().take_while(|&&s| s > 1e-12 * smax && s > 0.0).count();
    if rank == 0 || total == 0.0 {
        return Err(Error::DegenerateData("data has zero variance".into()));
    }
    let target = variance_fraction * total * (1.0 - 1e-12);
    let mut acc = 0.0;
    let mut r = rank;
    for (i, v) in var.iter().enumerate().take(rank) {
        acc += v;
        if acc >= target {
            r = i + 1;
            break;
        }
    }
    let ur = svd.u.slice(s![.., ..r]);
    Ok(linalg::matmul(ur.t(), centered.view()))
}

/// Stacks all views into one view, in order.
pub fn concat_features(d: &MultiViewDataset) -> MultiViewDataset {
    let views: Vec<_> = d.views.iter().map(|v| v.view()).collect();
    MultiViewDataset {
        views: vec![ndarray::concatenate(Axis(0), &views).expect("views share N")],
        labels: d.labels.clone(),
        k: d.k,
    }
}
