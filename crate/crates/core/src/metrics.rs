//! External clustering metrics: pair-counting precision, recall and F-score,
//! normalized mutual information and the adjusted Rand index.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Co-occurrence counts of true and predicted clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// `counts[i][j]`: points in true cluster `i` and predicted cluster `j`,
    /// clusters numbered by ascending label.
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub n: u64,
}

fn compress(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut ids = BTreeMap::new();
    for &l in labels {
        ids.entry(l).or_insert(0);
    }
    for (i, v) in ids.values_mut().enumerate() {
        *v = i;
    }
    (labels.iter().map(|l| ids[l]).collect(), ids.len())
}

impl ContingencyTable {
    pub fn new(truth: &[usize], pred: &[usize]) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::LengthMismatch(truth.len(), pred.len()));
        }
        let (t, nt) = compress(truth);
        let (p, np) = compress(pred);
        let mut counts = vec![vec![0u64; np]; nt];
        for (&i, &j) in t.iter().zip(&p) {
            counts[i][j] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..np).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(ContingencyTable {
            counts,
            row_sums,
            col_sums,
            n: truth.len() as u64,
        })
    }
}

fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Pair-counting confusion over all unordered pairs of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

pub fn pair_counts(truth: &[usize], pred: &[usize]) -> Result<PairCounts> {
    let t = ContingencyTable::new(truth, pred)?;
    let tp: u64 = t.counts.iter().flatten().map(|&c| choose2(c)).sum();
    let same_pred: u64 = t.col_sums.iter().map(|&c| choose2(c)).sum();
    let same_truth: u64 = t.row_sums.iter().map(|&c| choose2(c)).sum();
    let total = choose2(t.n);
    Ok(PairCounts {
        tp,
        fp: same_pred - tp,
        fn_: same_truth - tp,
        tn: total + tp - same_pred - same_truth,
    })
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `(precision, recall, F)`; a zero denominator yields 0.
pub fn precision_recall_fscore(c: &PairCounts) -> (f64, f64, f64) {
    (
        ratio(c.tp, c.tp + c.fp),
        ratio(c.tp, c.tp + c.fn_),
        ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_),
    )
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information over the arithmetic mean of the two entropies.
pub fn nmi(truth: &[usize], pred: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(truth, pred)?;
    let n = t.n as f64;
    let h = entropy(&t.row_sums, n) + entropy(&t.col_sums, n);
    if h == 0.0 {
        return Ok(0.0);
    }
    let one_to_one = t.row_sums.len() == t.col_sums.len()
        && t.counts.iter().all(|r| r.iter().filter(|&&c| c > 0).count() == 1);
    if one_to_one {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                mi += c / n * (n * c / (t.row_sums[i] as f64 * t.col_sums[j] as f64)).ln();
            }
        }
    }
    Ok((mi / (h / 2.0)).clamp(0.0, 1.0))
}

/// Hubert–Arabie adjusted Rand index, evaluated in integer arithmetic up to
/// one final division. Defined as 1 when both partitions are trivial.
pub fn adjusted_rand(truth: &[usize], pred: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(truth, pred)?;
    let sum_ij: i128 = t.counts.iter().flatten().map(|&c| choose2(c) as i128).sum();
    let sa: i128 = t.row_sums.iter().map(|&c| choose2(c) as i128).sum();
    let sb: i128 = t.col_sums.iter().map(|&c| choose2(c) as i128).sum();
    let m = choose2(t.n) as i128;
    let num = 2 * m * sum_ij - 2 * sa * sb;
    let den = m * (sa + sb) - 2 * sa * sb;
    if den == 0 {
        return Ok(1.0);
    }
    Ok(num as f64 / den as f64)
}

/// The five metrics of one clustering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
    pub nmi: f64,
    pub ari: f64,
}

impl MetricValues {
    pub fn compute(truth: &[usize], pred: &[usize]) -> Result<Self> {
        let (precision, recall, fscore) = precision_recall_fscore(&pair_counts(truth, pred)?);
        Ok(MetricValues {
            precision,
            recall,
            fscore,
            nmi: nmi(truth, pred)?,
            ari: adjusted_rand(truth, pred)?,
        })
    }
}

/// Mean with population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        MeanStd { mean, std: var.sqrt() }
    }
}

impl fmt::Display for MeanStd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3} ({:.3})", self.mean, self.std)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub fscore: MeanStd,
    pub nmi: MeanStd,
    pub ari: MeanStd,
    pub per_restart: Vec<MetricValues>,
}

impl MetricReport {
    pub const HEADER: [&'static str; 5] = ["Precision", "Recall", "F-score", "NMI", "Adj-RI"];

    pub fn cells(&self) -> [String; 5] {
        [self.precision, self.recall, self.fscore, self.nmi, self.ari].map(|m| m.to_string())
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.cells();
        for (i, (h, c)) in Self::HEADER.iter().zip(&cells).enumerate() {
            if i > 0 {
                write!(f, "  ")?;
            }
            write!(f, "{h} {c}")?;
        }
        Ok(())
    }
}

/// Means and standard deviations of every metric over the given restarts.
pub fn metric_report(truth: &[usize], assignments: &[Vec<usize>]) -> Result<MetricReport> {
    if assignments.is_empty() {
        return Err(Error::InvalidConfig("metric report needs at least one assignment".into()));
    }
    let per_restart = assignments
        .iter()
        .map(|a| MetricValues::compute(truth, a))
        .collect::<Result<Vec<_>>>()?;
    let col = |f: fn(&MetricValues) -> f64| MeanStd::of(&per_restart.iter().map(f).collect::<Vec<_>>());
    Ok(MetricReport {
        precision: col(|m| m.precision),
        recall: col(|m| m.recall),
        fscore: col(|m| m.fscore),
        nmi: col(|m| m.nmi),
        ari: col(|m| m.ari),
        per_restart,
    })
}
