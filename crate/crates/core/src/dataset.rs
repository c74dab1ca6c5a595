//! Multi-view dataset container.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of views describing the same `N` points.
///
/// View `v` is a `D_v × N` matrix whose columns are the data points. Labels,
/// when present, are 1-based cluster indices in `1..=k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiViewDataset {
    pub views: Vec<Array2<f64>>,
    pub labels: Option<Vec<usize>>,
    pub k: usize,
}

impl MultiViewDataset {
    /// Builds and validates a dataset.
    pub fn new(views: Vec<Array2<f64>>, labels: Option<Vec<usize>>, k: usize) -> Result<Self> {
        MultiViewDataset { views, labels, k }.validate()
    }

    /// Consumes and returns the dataset once every invariant holds.
    pub fn validate(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }

    /// Checks the invariants without taking ownership.
    pub fn check(&self) -> Result<()> {
        if self.views.is_empty() {
            return Err(Error::InvalidConfig("dataset has no views".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("cluster count k must be positive".into()));
        }
        let n = self.views[0].ncols();
        for (v, x) in self.views.iter().enumerate() {
            if x.ncols() != n {
                return Err(Error::MismatchedColumns {
                    view: v,
                    expected: n,
                    found: x.ncols(),
                });
            }
            if x.nrows() == 0 {
                return Err(Error::InvalidConfig(format!("view {v} has no features")));
            }
            if !x.iter().all(|e| e.is_finite()) {
                return Err(Error::NonFinite(format!("view {v}")));
            }
        }
        if n < 2 {
            return Err(Error::DegenerateData(format!(
                "at least two points are required, got {n}"
            )));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(Error::BadLabels(format!(
                    "{} labels for {} points",
                    labels.len(),
                    n
                )));
            }
            if let Some(bad) = labels.iter().find(|&&l| l == 0 || l > self.k) {
                return Err(Error::BadLabels(format!(
                    "label {bad} outside 1..={}",
                    self.k
                )));
            }
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.views[0].ncols()
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    /// Restriction to the given point indices, in order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let views = self
            .views
            .iter()
            .map(|x| x.select(ndarray::Axis(1), indices))
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        MultiViewDataset::new(views, labels, self.k)
    }
}

/// Returns the dataset unchanged if every invariant holds.
pub fn validate_dataset(d: MultiViewDataset) -> Result<MultiViewDataset> {
    d.validate()
}
