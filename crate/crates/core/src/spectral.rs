//! Affinity graphs, normalized spectral embedding and k-means.

use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Degree substituted for isolated vertices.
pub const MIN_DEGREE: f64 = 1e-12;
pub const KMEANS_MAX_ITERS: usize = 300;
pub const KMEANS_TOLERANCE: f64 = 1e-9;

/// Symmetric nonnegative graph weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    pub w: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// Cluster index of every point, in `1..=k`.
    pub labels: Vec<usize>,
    pub inertia: f64,
    /// Set when some cluster ended up empty.
    pub degenerate: bool,
}

/// `W = |C| + |C|ᵀ`.
pub fn affinity_from_representation(c: &Array2<f64>) -> AffinityMatrix {
    let n = c.nrows();
    AffinityMatrix {
        w: Array2::from_shape_fn((n, n), |(i, j)| c[[i, j]].abs() + c[[j, i]].abs()),
    }
}

/// Element-wise mean of equally shaped matrices.
pub fn average_representations(c_views: &[Array2<f64>]) -> Result<Array2<f64>> {
    let first = c_views
        .first()
        .ok_or_else(|| Error::InvalidConfig("no representations to average".into()))?;
    let mut sum = Array2::zeros(first.raw_dim());
    for (v, c) in c_views.iter().enumerate() {
        if c.dim() != first.dim() {
            return Err(Error::MismatchedColumns {
                view: v,
                expected: first.ncols(),
                found: c.ncols(),
            });
        }
        sum += c;
    }
    Ok(sum / c_views.len() as f64)
}

/// Rows of the `k` leading eigenvectors of `D^{-1/2} W D^{-1/2}`, each scaled
/// to unit length. Zero rows become the uniform vector.
pub fn spectral_embedding(w: &AffinityMatrix, k: usize) -> Result<Array2<f64>> {
    let n = w.w.nrows();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let inv_sqrt: Array1<f64> = w
        .w
        .sum_axis(Axis(1))
        .mapv(|d| 1.0 / if d > 0.0 { d } else { MIN_DEGREE }.sqrt());
    let m = Array2::from_shape_fn((n, n), |(i, j)| inv_sqrt[i] * w.w[[i, j]] * inv_sqrt[j]);
    let (_, vecs) = linalg::sym_eigen(m.view())?;
    // Ascending eigenvalues: the leading k are the last k columns, largest first.
    let mut emb = vecs.slice(s![.., n - k..;-1]).to_owned();
    let uniform = 1.0 / (k as f64).sqrt();
    for mut row in emb.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row /= norm;
        } else {
            row.fill(uniform);
        }
    }
    Ok(emb)
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: ArrayView1<'_, f64>, centroids: &Array2<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centre) in centroids.rows().into_iter().enumerate() {
        let d = sq_dist(p, centre);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// One Lloyd run from `k` distinct random points; labels are 0-based here.
/// Returns the labels, the inertia after every assignment step, and whether a
/// cluster emptied.
pub(crate) fn lloyd(points: &Array2<f64>, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<f64>, bool) {
    let n = points.nrows();
    let init = rand::seq::index::sample(rng, n, k);
    let mut centroids = Array2::zeros((k, points.ncols()));
    for (c, i) in init.iter().enumerate() {
        centroids.row_mut(c).assign(&points.row(i));
    }
    let mut labels = vec![0; n];
    let mut history = Vec::new();
    let mut degenerate = false;
    for _ in 0..KMEANS_MAX_ITERS {
        let mut inertia = 0.0;
        for (i, p) in points.rows().into_iter().enumerate() {
            let (c, d) = nearest(p, &centroids);
            labels[i] = c;
            inertia += d;
        }
        let stop = history
            .last()
            .is_some_and(|&prev: &f64| prev - inertia <= KMEANS_TOLERANCE * prev);
        history.push(inertia);
        if stop {
            break;
        }
        let mut sums = Array2::<f64>::zeros(centroids.raw_dim());
        let mut counts = vec![0usize; k];
        for (i, p) in points.rows().into_iter().enumerate() {
            let mut row = sums.row_mut(labels[i]);
            row += &p;
            counts[labels[i]] += 1;
        }
        degenerate = false;
        for c in 0..k {
            if counts[c] == 0 {
                degenerate = true;
            } else {
                let mean = &sums.row(c) / counts[c] as f64;
                centroids.row_mut(c).assign(&mean);
            }
        }
    }
    (labels, history, degenerate)
}

fn restart_rng(seed: u64, restart: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    rng
}

/// Every restart of seeded Lloyd k-means, in restart order.
pub fn kmeans_restarts(points: &Array2<f64>, k: usize, restarts: usize, seed: u64) -> Result<Vec<ClusterAssignment>> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    if restarts == 0 {
        return Err(Error::InvalidConfig("k-means needs at least one restart".into()));
    }
    Ok((0..restarts as u64)
        .into_par_iter()
        .map(|r| {
            let (labels, history, degenerate) = lloyd(points, k, &mut restart_rng(seed, r));
            ClusterAssignment {
                labels: labels.into_iter().map(|l| l + 1).collect(),
                inertia: *history.last().unwrap(),
                degenerate,
            }
        })
        .collect())
}

/// The lowest-inertia assignment over `restarts` runs; ties go to the earlier run.
pub fn kmeans(points: &Array2<f64>, k: usize, restarts: usize, seed: u64) -> Result<ClusterAssignment> {
    let all = kmeans_restarts(points, k, restarts, seed)?;
    Ok(all
        .into_iter()
        .reduce(|best, a| if a.inertia < best.inertia { a } else { best })
        .unwrap())
}

/// Embeds once and returns one k-means assignment per restart.
pub fn spectral_clustering(w: &AffinityMatrix, k: usize, restarts: usize, seed: u64) -> Result<Vec<ClusterAssignment>> {
    let emb = spectral_embedding(w, k)?;
    kmeans_restarts(&emb, k, restarts, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn affinity_example() {
        let w = affinity_from_representation(&array![[0.0, 1.0], [-2.0, 0.0]]);
        assert_eq!(w.w, array![[0.0, 3.0], [3.0, 0.0]]);
    }

    #[test]
    fn average_example() {
        let a = array![[0.0, 2.0], [0.0, 0.0]];
        let b = array![[0.0, 0.0], [2.0, 0.0]];
        assert_eq!(average_representations(&[a.clone(), b]).unwrap(), array![[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(average_representations(&[a.clone()]).unwrap(), a);
    }

    #[test]
    fn kmeans_k_equals_n() {
        let pts = array![[0.0, 0.0], [1.0, 0.0], [0.0, 5.0]];
        let a = kmeans(&pts, 3, 4, 1).unwrap();
        assert_eq!(a.inertia, 0.0);
        let mut l = a.labels.clone();
        l.sort();
        assert_eq!(l, vec![1, 2, 3]);
    }

    #[test]
    fn kmeans_rejects_large_k() {
        assert!(matches!(kmeans(&Array2::zeros((2, 2)), 3, 1, 0), Err(Error::BadK { .. })));
    }

    #[test]
    fn lloyd_inertia_never_increases() {
        let mut rng = restart_rng(5, 0);
        let pts = Array2::from_shape_fn((60, 3), |(i, j)| ((i * 31 + j * 17) % 23) as f64 / 7.0);
        for r in 0..10 {
            let (_, history, _) = lloyd(&pts, 4, &mut restart_rng(r, 1));
            assert!(history.windows(2).all(|w| w[1] <= w[0]));
        }
        let (_, history, _) = lloyd(&pts, 5, &mut rng);
        assert!(history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn single_cluster() {
        let w = affinity_from_representation(&array![[0.0, 1.0, 0.5], [1.0, 0.0, 0.2], [0.5, 0.2, 0.0]]);
        let out = spectral_clustering(&w, 1, 3, 9).unwrap();
        assert!(out.iter().all(|a| a.labels == vec![1, 1, 1]));
    }
}
