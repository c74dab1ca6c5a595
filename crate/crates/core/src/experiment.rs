//! Fit, grid-search, timing and trace drivers shared by the CLI and tests.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admm::{solve, ConvergenceReport, SolveInput};
use crate::config::{KernelKind, Mode, SolverConfig};
use crate::data;
use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::metrics::{metric_report, MetricReport};
use crate::spectral::{affinity_from_representation, spectral_clustering};

/// Number of k-means restarts per fit.
pub const DEFAULT_RESTARTS: usize = 20;
pub const DEFAULT_SEED: u64 = 2018;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub config: SolverConfig,
    pub restarts: usize,
    pub seed: u64,
    /// Store elapsed seconds in the record. Off by default so records are
    /// reproducible byte for byte.
    pub record_time: bool,
}

impl FitOptions {
    pub fn new(config: SolverConfig) -> Self {
        FitOptions {
            config,
            restarts: DEFAULT_RESTARTS,
            seed: DEFAULT_SEED,
            record_time: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

/// Everything produced by one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: SolverConfig,
    pub seed: u64,
    pub restarts: usize,
    pub report: ConvergenceReport,
    /// Present when the dataset has labels.
    pub metrics: Option<MetricReport>,
    /// Labels of the lowest-inertia k-means restart.
    pub labels: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

/// Solve, build the affinity, cluster with every restart, and score.
pub fn fit(dataset: &MultiViewDataset, opts: &FitOptions) -> Result<RunRecord> {
    dataset.check()?;
    let start = Instant::now();
    let input = SolveInput::from_dataset(dataset, &opts.config)?;
    let result = solve(&input, &opts.config)?;
    let w = affinity_from_representation(&result.combined());
    let assignments = spectral_clustering(&w, dataset.k, opts.restarts, opts.seed)?;
    let label_sets: Vec<Vec<usize>> = assignments.iter().map(|a| a.labels.clone()).collect();
    let metrics = dataset
        .labels
        .as_ref()
        .map(|truth| metric_report(truth, &label_sets))
        .transpose()?;
    let best = assignments
        .into_iter()
        .reduce(|b, a| if a.inertia < b.inertia { a } else { b })
        .unwrap();
    Ok(RunRecord {
        config: opts.config.clone(),
        seed: opts.seed,
        restarts: opts.restarts,
        report: result.report,
        metrics,
        labels: best.labels,
        wall_clock_seconds: opts.record_time.then(|| start.elapsed().as_secs_f64()),
    })
}

/// Hyperparameter grid; `β2 = 1 − β1` at every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub beta1: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    /// Used only with a Gaussian kernel.
    pub sigma_multipliers: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            beta1: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            lambda: vec![0.3, 0.5, 0.7, 0.9],
            mu: vec![10.0, 1e2, 1e3, 1e4],
            sigma_multipliers: vec![0.5, 1.0, 5.0, 10.0, 50.0],
        }
    }
}

impl GridSpec {
    /// A grid holding exactly the values of `config`.
    pub fn single(config: &SolverConfig) -> Self {
        GridSpec {
            beta1: vec![config.beta1],
            lambda: vec![config.lambda[0]],
            mu: vec![config.mu_init],
            sigma_multipliers: vec![config.kernel.map_or(1.0, |k| k.sigma_multiplier)],
        }
    }

    /// Configurations in sweep order: `β1`, then `λ`, then `μ`, then `σ`
    /// (slowest to fastest). `λ` collapses to one value in single-view mode
    /// and `σ` is swept only for a Gaussian kernel.
    pub fn points(&self, base: &SolverConfig) -> Result<Vec<SolverConfig>> {
        if self.beta1.is_empty() || self.lambda.is_empty() || self.mu.is_empty() {
            return Err(Error::InvalidConfig("grid axes must be nonempty".into()));
        }
        let gaussian = base.kernel.is_some_and(|k| k.kind == KernelKind::Gaussian);
        if gaussian && self.sigma_multipliers.is_empty() {
            return Err(Error::InvalidConfig("no sigma multipliers for a Gaussian kernel".into()));
        }
        let lambdas = if base.mode == Mode::SingleView {
            &self.lambda[..1]
        } else {
            &self.lambda[..]
        };
        let sigmas: Vec<Option<f64>> = if gaussian {
            self.sigma_multipliers.iter().map(|&s| Some(s)).collect()
        } else {
            vec![None]
        };
        let mut out = Vec::new();
        for &b1 in &self.beta1 {
            for &l in lambdas {
                for &mu in &self.mu {
                    for &s in &sigmas {
                        let mut c = base.clone().with_betas(b1, 1.0 - b1).with_lambda(l).with_mu(mu);
                        if let (Some(s), Some(k)) = (s, c.kernel.as_mut()) {
                            k.sigma_multiplier = s;
                        }
                        out.push(c);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One row of a grid sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub lambda: f64,
    pub mu: f64,
    pub sigma_multiplier: Option<f64>,
    pub seed: u64,
    pub nmi_mean: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub sweep: Vec<SweepRow>,
    pub best_index: usize,
    pub best: RunRecord,
}

/// Seed of grid point `index`; point 0 keeps the base seed.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Exhaustive sweep selecting the highest mean NMI; ties go to the earlier point.
pub fn grid(dataset: &MultiViewDataset, base: &FitOptions, spec: &GridSpec) -> Result<GridResult> {
    let truth_present = dataset.labels.is_some();
    if !truth_present {
        return Err(Error::BadLabels("grid search needs ground-truth labels".into()));
    }
    let configs = spec.points(&base.config)?;
    let records = configs
        .into_par_iter()
        .enumerate()
        .map(|(i, config)| {
            let opts = FitOptions {
                config,
                seed: point_seed(base.seed, i),
                ..base.clone()
            };
            fit(dataset, &opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let nmi_of = |r: &RunRecord| r.metrics.as_ref().map_or(f64::NAN, |m| m.nmi.mean);
    let sweep = records
        .iter()
        .enumerate()
        .map(|(index, r)| SweepRow {
            index,
            beta1: r.config.beta1,
            beta2: r.config.beta2,
            lambda: r.config.lambda[0],
            mu: r.config.mu_init,
            sigma_multiplier: r
                .config
                .kernel
                .filter(|k| k.kind == KernelKind::Gaussian)
                .map(|k| k.sigma_multiplier),
            seed: r.seed,
            nmi_mean: nmi_of(r),
            converged: r.report.converged,
            iterations: r.report.iterations,
        })
        .collect::<Vec<_>>();
    let mut best_index = 0;
    for (i, row) in sweep.iter().enumerate() {
        if row.nmi_mean > sweep[best_index].nmi_mean {
            best_index = i;
        }
    }
    let best = records.into_iter().nth(best_index).unwrap();
    Ok(GridResult {
        sweep,
        best_index,
        best,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub repeats: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
    pub mean_iterations: f64,
}

/// Times the solver alone on random subsets of the synthetic benchmark.
pub fn bench(sizes: &[usize], repeats: usize, seed: u64, config: &SolverConfig) -> Result<Vec<BenchRow>> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("bench needs at least one repeat".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("bench sizes must be strictly ascending".into()));
    }
    let full = data::generate_synthetic(seed);
    let total = full.n_points();
    sizes
        .iter()
        .map(|&n| {
            if n < 2 || n > total {
                return Err(Error::InvalidConfig(format!("bench size {n} outside 2..={total}")));
            }
            // Labels are shuffled, so a prefix is a uniform random subset.
            let subset = full.subset(&(0..n).collect::<Vec<_>>())?;
            let input = SolveInput::from_dataset(&subset, config)?;
            let mut times = Vec::with_capacity(repeats);
            let mut iterations = 0usize;
            for _ in 0..repeats {
                let start = Instant::now();
                let r = solve(&input, config)?;
                times.push(start.elapsed().as_secs_f64());
                iterations += r.report.iterations;
            }
            let m = crate::metrics::MeanStd::of(&times);
            Ok(BenchRow {
                n,
                repeats,
                mean_seconds: m.mean,
                std_seconds: m.std,
                mean_iterations: iterations as f64 / repeats as f64,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Sum of all residuals over all views.
    pub residual_sum: f64,
    /// Per view, residual sum divided by its first-iteration value, then summed.
    pub normalized_residual_sum: f64,
    pub objective: f64,
}

/// Per-iteration traces of a report.
pub fn trace_rows(report: &ConvergenceReport) -> Vec<TraceRow> {
    let first: Vec<f64> = report
        .residual_trace
        .first()
        .map(|views| {
            views
                .iter()
                .map(|r| {
                    let s: f64 = r.as_array().iter().sum();
                    if s > 0.0 { s } else { 1.0 }
                })
                .collect()
        })
        .unwrap_or_default();
    report
        .residual_trace
        .iter()
        .zip(&report.objective_trace)
        .enumerate()
        .map(|(i, (views, &objective))| {
            let sums: Vec<f64> = views.iter().map(|r| r.as_array().iter().sum()).collect();
            TraceRow {
                iteration: i + 1,
                residual_sum: sums.iter().sum(),
                normalized_residual_sum: sums.iter().zip(&first).map(|(s, f)| s / f).sum(),
                objective,
            }
        })
        .collect()
}

/// Runs the solver and returns its report with the derived trace table.
pub fn trace(dataset: &MultiViewDataset, config: &SolverConfig) -> Result<(ConvergenceReport, Vec<TraceRow>)> {
    dataset.check()?;
    let input = SolveInput::from_dataset(dataset, config)?;
    let report = solve(&input, config)?.report;
    let rows = trace_rows(&report);
    Ok((report, rows))
}
