//! `mlrssc` command-line harness.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mlrssc::data;
use mlrssc::experiment::{self, BenchRow, FitOptions, GridSpec, RunRecord, SweepRow};
use mlrssc::metrics::MetricReport;
use mlrssc::{Fidelity, KernelSpec, Mode, MultiViewDataset, SolverConfig};

#[derive(Parser)]
#[command(name = "mlrssc", version, about = "Multi-view low-rank sparse subspace clustering")]
struct Cli {
    /// Worker threads for grid points and k-means restarts.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the two-view synthetic benchmark to a directory.
    Synth {
        #[arg(long, default_value_t = experiment::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one configuration and report clustering metrics.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sweep the hyperparameter grid and report the best point.
    Grid {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Time the solver on subsets of the synthetic benchmark.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [200usize, 400, 800])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = experiment::DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        algo: AlgoArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit per-iteration residual and objective traces as CSV.
    Trace {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        algo: AlgoArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    /// One delimited text file per view, rows are samples.
    #[arg(long, num_args = 1.., required = true)]
    views: Vec<PathBuf>,
    /// One integer label per line.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Number of clusters.
    #[arg(long)]
    k: usize,
    /// Reduce every view to the principal components explaining this fraction of variance.
    #[arg(long)]
    pca: Option<f64>,
    /// In single-view mode, use only this view (0-based) instead of concatenating all views.
    #[arg(long)]
    view_index: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Single,
    Pairwise,
    Centroid,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FidelityArg {
    Exact,
    Noisy,
    Kernel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Linear,
    Gaussian,
}

#[derive(Args)]
struct AlgoArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Pairwise)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = FidelityArg::Noisy)]
    fidelity: FidelityArg,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    kernel: KernelArg,
    /// Gaussian bandwidth as a multiple of the median pairwise distance.
    #[arg(long, default_value_t = 1.0)]
    sigma_mult: f64,
    #[arg(long, default_value_t = 0.5)]
    beta1: f64,
    /// Defaults to 1 − beta1.
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 100.0)]
    mu: f64,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 1e6)]
    mu_max: f64,
    /// Defaults to 1e-3, or 1e-5 in kernel mode.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = experiment::DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = experiment::DEFAULT_SEED)]
    seed: u64,
    /// Line-delimited JSON output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include elapsed seconds in the records.
    #[arg(long)]
    time: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    grid_beta1: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    grid_lambda: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    grid_mu: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    grid_sigma: Option<Vec<f64>>,
}

impl AlgoArgs {
    fn config(&self) -> SolverConfig {
        let mode = match self.mode {
            ModeArg::Single => Mode::SingleView,
            ModeArg::Pairwise => Mode::Pairwise,
            ModeArg::Centroid => Mode::Centroid,
        };
        let mut c = match self.fidelity {
            FidelityArg::Exact => SolverConfig::new(mode, Fidelity::Exact),
            FidelityArg::Noisy => SolverConfig::new(mode, Fidelity::Noisy),
            FidelityArg::Kernel => SolverConfig::kernel(
                mode,
                match self.kernel {
                    KernelArg::Linear => KernelSpec::linear(),
                    KernelArg::Gaussian => KernelSpec::gaussian(self.sigma_mult),
                },
            ),
        };
        c = c
            .with_betas(self.beta1, self.beta2.unwrap_or(1.0 - self.beta1))
            .with_lambda(self.lambda)
            .with_mu(self.mu);
        if let Some(rho) = self.rho {
            c.rho = rho;
        }
        if let Some(eps) = self.epsilon {
            c.epsilon = eps;
        }
        c.mu_max = self.mu_max;
        c.max_iters = self.max_iters;
        c
    }
}

impl DataArgs {
    fn load(&self, mode: Mode) -> Result<MultiViewDataset> {
        let mut d = data::load_views(&self.views, self.labels.as_deref(), self.k)?;
        if let Some(f) = self.pca {
            for v in d.views.iter_mut() {
                *v = data::pca_reduce(v, f)?;
            }
        }
        if mode == Mode::SingleView && d.n_views() > 1 {
            d = match self.view_index {
                Some(i) if i < d.n_views() => MultiViewDataset::new(vec![d.views[i].clone()], d.labels, d.k)?,
                Some(i) => bail!("view index {i} out of range for {} views", d.n_views()),
                None => data::concat_features(&d),
            };
        }
        Ok(d)
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum OutputRecord<'a> {
    Run(&'a RunRecord),
    Sweep(&'a SweepRow),
    Best(&'a RunRecord),
    Bench(&'a BenchRow),
}

fn write_records(path: &Path, records: &[OutputRecord<'_>]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Row label in the style of the published results table.
fn algorithm_name(c: &SolverConfig) -> String {
    let family = if c.kernel.is_some() { "KMLRSSC" } else { "MLRSSC" };
    match c.mode {
        Mode::SingleView if c.kernel.is_some() => "KLRSSC".into(),
        Mode::SingleView => "LRSSC".into(),
        Mode::Pairwise => format!("Pairwise {family}"),
        Mode::Centroid => format!("Centroid {family}"),
    }
}

fn results_table(rows: &[(String, &MetricReport)]) -> String {
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(9);
    let mut s = format!("{:<width$}", "Algorithm");
    for h in MetricReport::HEADER {
        s.push_str(&format!("  {h:<13}"));
    }
    s.push('\n');
    for (name, m) in rows {
        s.push_str(&format!("{name:<width$}"));
        for c in m.cells() {
            s.push_str(&format!("  {c:<13}"));
        }
        s.push('\n');
    }
    s
}

fn print_run(r: &RunRecord) {
    println!(
        "converged: {}  iterations: {}",
        r.report.converged, r.report.iterations
    );
    match &r.metrics {
        Some(m) => print!("{}", results_table(&[(algorithm_name(&r.config), m)])),
        None => println!("labels: {:?}", r.labels),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .context("configuring worker pool")?;
    }
    match cli.command {
        Command::Synth { seed, out } => {
            let d = data::generate_synthetic(seed);
            let (views, labels) = data::save_dataset(&out, &d)?;
            for p in views.iter().chain(labels.iter()) {
                println!("{}", p.display());
            }
        }
        Command::Fit { data, algo, run } => {
            let config = algo.config();
            let dataset = data.load(config.mode)?;
            let opts = FitOptions {
                config,
                restarts: run.restarts,
                seed: run.seed,
                record_time: run.time,
            };
            let record = experiment::fit(&dataset, &opts)?;
            print_run(&record);
            if let Some(out) = &run.out {
                write_records(out, &[OutputRecord::Run(&record)])?;
            }
        }
        Command::Grid { data, algo, run, grid } => {
            let config = algo.config();
            let dataset = data.load(config.mode)?;
            let defaults = GridSpec::default();
            let spec = GridSpec {
                beta1: grid.grid_beta1.unwrap_or(defaults.beta1),
                lambda: grid.grid_lambda.unwrap_or(defaults.lambda),
                mu: grid.grid_mu.unwrap_or(defaults.mu),
                sigma_multipliers: grid.grid_sigma.unwrap_or(defaults.sigma_multipliers),
            };
            let opts = FitOptions {
                config,
                restarts: run.restarts,
                seed: run.seed,
                record_time: run.time,
            };
            let result = experiment::grid(&dataset, &opts, &spec)?;
            println!("index  beta1  lambda  mu        sigma  iters  NMI");
            for row in &result.sweep {
                println!(
                    "{:<5}  {:<5}  {:<6}  {:<8}  {:<5}  {:<5}  {:.3}",
                    row.index,
                    row.beta1,
                    row.lambda,
                    row.mu,
                    row.sigma_multiplier.map_or("-".into(), |s| s.to_string()),
                    row.iterations,
                    row.nmi_mean
                );
            }
            println!("best point: {}", result.best_index);
            print_run(&result.best);
            if let Some(out) = &run.out {
                let mut records: Vec<_> = result.sweep.iter().map(OutputRecord::Sweep).collect();
                records.push(OutputRecord::Best(&result.best));
                write_records(out, &records)?;
            }
        }
        Command::Bench {
            sizes,
            repeats,
            seed,
            algo,
            out,
        } => {
            let rows = experiment::bench(&sizes, repeats, seed, &algo.config())?;
            println!("N      mean_s     std_s      iters  (n = {repeats} per cell)");
            for r in &rows {
                println!(
                    "{:<5}  {:<9.4}  {:<9.4}  {:.1}",
                    r.n, r.mean_seconds, r.std_seconds, r.mean_iterations
                );
            }
            if let Some(out) = &out {
                let records: Vec<_> = rows.iter().map(OutputRecord::Bench).collect();
                write_records(out, &records)?;
            }
        }
        Command::Trace { data, algo, out } => {
            let config = algo.config();
            let dataset = data.load(config.mode)?;
            let (_, rows) = experiment::trace(&dataset, &config)?;
            let mut csv = String::from("iteration,residual_sum,normalized_residual_sum,objective\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    r.iteration, r.residual_sum, r.normalized_residual_sum, r.objective
                ));
            }
            match out {
                Some(p) => fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?,
                None => std::io::stdout().write_all(csv.as_bytes())?,
            }
        }
    }
    Ok(())
}
