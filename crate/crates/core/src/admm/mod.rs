//! ADMM solvers for single-view, pairwise and centroid-regularized
//! low-rank sparse representation learning.
//!
//! Every view carries its own splitting `A = C1 = C2 = C3` (plus `X = XA` in
//! exact mode): `C1` takes the nuclear-norm prox, `C2` the L1 prox with a zero
//! diagonal, and `C3` the consensus term. Views are updated from a snapshot of
//! the other views taken at the start of each outer iteration, then the
//! penalties grow geometrically and, in centroid mode, the centroid is refreshed.

mod objective;
mod updates;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use objective::{consensus_penalty, evaluate_objective, kernel_fidelity, linear_fidelity};
pub use updates::{
    check_convergence, update_a_exact, update_a_noisy, update_c1, update_c2, update_c3_centroid,
    update_c3_pairwise, update_centroid, update_duals, ViewResiduals,
};

use crate::config::{Fidelity, KernelKind, Mode, SolverConfig};
use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::{kernel, linalg};

/// Iterates and multipliers of one view.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmViewState {
    pub a: Array2<f64>,
    pub c1: Array2<f64>,
    pub c2: Array2<f64>,
    pub c3: Array2<f64>,
    /// Multiplier of `X = XA`, `D × N`; exact mode only.
    pub l1: Option<Array2<f64>>,
    pub l2: Array2<f64>,
    pub l3: Array2<f64>,
    pub l4: Array2<f64>,
}

impl AdmmViewState {
    pub fn zeros(n: usize, d: usize, exact: bool) -> Self {
        let z = Array2::zeros((n, n));
        AdmmViewState {
            a: z.clone(),
            c1: z.clone(),
            c2: z.clone(),
            c3: z.clone(),
            l1: exact.then(|| Array2::zeros((d, n))),
            l2: z.clone(),
            l3: z.clone(),
            l4: z,
        }
    }

    fn all_finite(&self) -> bool {
        [&self.a, &self.c1, &self.c2, &self.c3, &self.l2, &self.l3, &self.l4]
            .iter()
            .all(|m| m.iter().all(|x| x.is_finite()))
            && self.l1.as_ref().is_none_or(|l| l.iter().all(|x| x.is_finite()))
    }
}

/// Penalty parameters of the four constraint families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyState {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub rho: f64,
    pub mu_max: f64,
}

impl PenaltyState {
    pub fn uniform(mu: f64, rho: f64, mu_max: f64) -> Self {
        PenaltyState {
            mu1: mu,
            mu2: mu,
            mu3: mu,
            mu4: mu,
            rho,
            mu_max,
        }
    }

    /// `μᵢ ← min(ρ μᵢ, μ_max)`.
    pub fn step(&self) -> Self {
        let grow = |mu: f64| (self.rho * mu).min(self.mu_max);
        PenaltyState {
            mu1: grow(self.mu1),
            mu2: grow(self.mu2),
            mu3: grow(self.mu3),
            mu4: grow(self.mu4),
            ..*self
        }
    }
}

pub fn penalty_step(p: &PenaltyState) -> PenaltyState {
    p.step()
}

/// Solver input: raw views for the linear modes, Gram matrices for kernel mode.
#[derive(Debug, Clone)]
pub enum SolveInput {
    Linear(Vec<Array2<f64>>),
    Kernel(Vec<Array2<f64>>),
}

impl SolveInput {
    /// Builds the input a configuration asks for, computing one Gram matrix
    /// per view when a kernel is configured.
    pub fn from_dataset(dataset: &MultiViewDataset, config: &SolverConfig) -> Result<Self> {
        match &config.kernel {
            None => Ok(SolveInput::Linear(dataset.views.clone())),
            Some(spec) => {
                let grams = dataset
                    .views
                    .iter()
                    .map(|x| match spec.kind {
                        KernelKind::Linear => Ok(kernel::gram_linear(x).k),
                        KernelKind::Gaussian => {
                            let sigma = spec.sigma_multiplier * kernel::median_pairwise_distance(x)?;
                            Ok(kernel::gram_gaussian(x, sigma).k)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SolveInput::Kernel(grams))
            }
        }
    }

    fn matrices(&self) -> &[Array2<f64>] {
        match self {
            SolveInput::Linear(m) | SolveInput::Kernel(m) => m,
        }
    }

    pub fn n_views(&self) -> usize {
        self.matrices().len()
    }

    pub fn n_points(&self) -> usize {
        self.matrices().first().map_or(0, |m| m.ncols())
    }

    pub fn validate(&self) -> Result<()> {
        let mats = self.matrices();
        if mats.is_empty() {
            return Err(Error::InvalidConfig("no views to solve".into()));
        }
        let n = mats[0].ncols();
        for (v, m) in mats.iter().enumerate() {
            if m.ncols() != n {
                return Err(Error::MismatchedColumns {
                    view: v,
                    expected: n,
                    found: m.ncols(),
                });
            }
            if !m.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite(format!("solver input {v}")));
            }
            if let SolveInput::Kernel(_) = self {
                if m.nrows() != n {
                    return Err(Error::InvalidConfig(format!(
                        "Gram matrix {v} is {}×{}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let asym = linalg::inf_norm_diff(m.view(), m.t());
                if asym > 1e-8 {
                    return Err(Error::InvalidConfig(format!(
                        "Gram matrix {v} is not symmetric (deviation {asym:e})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Convergence diagnostics, one trace entry per completed iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub iterations: usize,
    /// Per iteration, the residuals of every view.
    pub residual_trace: Vec<Vec<ViewResiduals>>,
    pub objective_trace: Vec<f64>,
    /// Penalty value in effect during each iteration.
    pub mu_trace: Vec<f64>,
}

impl ConvergenceReport {
    /// Sum over views and residual families for each iteration.
    pub fn residual_sums(&self) -> Vec<f64> {
        self.residual_trace
            .iter()
            .map(|views| views.iter().map(|r| r.as_array().iter().sum::<f64>()).sum())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RepresentationResult {
    /// Final `C2` of every view (zero diagonal).
    pub views: Vec<Array2<f64>>,
    /// Consensus-coupled `C3` of every view.
    pub consensus: Vec<Array2<f64>>,
    /// Shared representation; centroid mode only.
    pub centroid: Option<Array2<f64>>,
    pub report: ConvergenceReport,
}

impl RepresentationResult {
    /// The matrix the affinity graph is built from: the centroid in centroid
    /// mode, otherwise the element-wise mean of the per-view representations.
    pub fn combined(&self) -> Array2<f64> {
        match &self.centroid {
            Some(c) => c.clone(),
            None => crate::spectral::average_representations(&self.views)
                .expect("solver output has at least one view of uniform shape"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coupling {
    None,
    Pairwise,
    Centroid,
}

/// Stateful ADMM driver; [`solve`] runs it to completion.
pub struct Solver<'a> {
    input: &'a SolveInput,
    config: &'a SolverConfig,
    lambdas: Vec<f64>,
    coupling: Coupling,
    grams: Vec<Array2<f64>>,
    states: Vec<AdmmViewState>,
    penalties: PenaltyState,
    centroid: Option<Array2<f64>>,
    report: ConvergenceReport,
}

impl<'a> Solver<'a> {
    pub fn new(input: &'a SolveInput, config: &'a SolverConfig) -> Result<Self> {
        config.validate()?;
        input.validate()?;
        let n_views = input.n_views();
        let n = input.n_points();
        let lambdas = config.lambdas(n_views)?;
        let exact = config.fidelity == Fidelity::Exact;
        if exact && matches!(input, SolveInput::Kernel(_)) {
            return Err(Error::InvalidConfig(
                "kernel solvers require noisy fidelity".into(),
            ));
        }
        let coupling = match (config.mode, n_views) {
            (Mode::SingleView, 1) => Coupling::None,
            (Mode::SingleView, v) => {
                return Err(Error::InvalidConfig(format!(
                    "single-view solver given {v} views"
                )))
            }
            // With one view the centroid coincides with that view and the
            // consensus term is identically zero.
            (_, 1) => Coupling::None,
            (Mode::Pairwise, _) => Coupling::Pairwise,
            (Mode::Centroid, _) => Coupling::Centroid,
        };
        if coupling == Coupling::Centroid && !(lambdas.iter().sum::<f64>() > 0.0) {
            return Err(Error::AllZeroLambda);
        }
        let grams = match input {
            SolveInput::Linear(xs) => xs.iter().map(|x| linalg::gram(x.view())).collect(),
            SolveInput::Kernel(ks) => ks.clone(),
        };
        let states = match input {
            SolveInput::Linear(xs) => xs
                .iter()
                .map(|x| AdmmViewState::zeros(n, x.nrows(), exact))
                .collect(),
            SolveInput::Kernel(_) => (0..n_views).map(|_| AdmmViewState::zeros(n, 0, false)).collect(),
        };
        Ok(Solver {
            input,
            config,
            lambdas,
            coupling,
            grams,
            states,
            penalties: PenaltyState::uniform(config.mu_init, config.rho, config.mu_max),
            centroid: (config.mode == Mode::Centroid).then(|| Array2::zeros((n, n))),
            report: ConvergenceReport {
                converged: false,
                iterations: 0,
                residual_trace: Vec::new(),
                objective_trace: Vec::new(),
                mu_trace: Vec::new(),
            },
        })
    }

    pub fn states(&self) -> &[AdmmViewState] {
        &self.states
    }

    pub fn penalties(&self) -> &PenaltyState {
        &self.penalties
    }

    pub fn centroid(&self) -> Option<&Array2<f64>> {
        self.centroid.as_ref()
    }

    pub fn report(&self) -> &ConvergenceReport {
        &self.report
    }

    /// Runs one outer iteration over all views and returns whether the
    /// convergence test passed.
    pub fn step(&mut self) -> Result<bool> {
        let cfg = self.config;
        let p = self.penalties;
        let n_views = self.states.len();

        // Snapshot of the consensus variables at the start of the iteration.
        let c3_total = match self.coupling {
            Coupling::Pairwise => {
                let mut total = Array2::zeros(self.states[0].c3.raw_dim());
                for s in &self.states {
                    total += &s.c3;
                }
                Some(total)
            }
            _ => None,
        };

        let mut previous_a = Vec::with_capacity(n_views);
        for v in 0..n_views {
            let state = &self.states[v];
            let a = match (self.input, cfg.fidelity) {
                (SolveInput::Linear(xs), Fidelity::Exact) => {
                    updates::a_exact_with_gram(state, &xs[v], &self.grams[v], &p)?
                }
                _ => update_a_noisy(state, &self.grams[v], &p)?,
            };
            let c1 = update_c1(&a, &state.l3, cfg.beta1, p.mu3)?;
            let c2 = update_c2(&a, &state.l2, cfg.beta2, p.mu2);
            let c3 = match self.coupling {
                Coupling::None => updates::c3_pairwise_from_sum(&a, &state.l4, &a, 0, 0.0, p.mu4),
                Coupling::Pairwise => {
                    let others = c3_total.as_ref().unwrap() - &state.c3;
                    updates::c3_pairwise_from_sum(&a, &state.l4, &others, n_views - 1, self.lambdas[v], p.mu4)
                }
                Coupling::Centroid => update_c3_centroid(
                    &a,
                    &state.l4,
                    self.centroid.as_ref().unwrap(),
                    self.lambdas[v],
                    p.mu4,
                ),
            };
            let state = &mut self.states[v];
            previous_a.push(std::mem::replace(&mut state.a, a));
            state.c1 = c1;
            state.c2 = c2;
            state.c3 = c3;
            let x = match self.input {
                SolveInput::Linear(xs) => Some(&xs[v]),
                SolveInput::Kernel(_) => None,
            };
            update_duals(state, x, &p);
            if !state.all_finite() {
                return Err(Error::NonFinite(format!(
                    "ADMM iterate of view {v} at iteration {}",
                    self.report.iterations + 1
                )));
            }
        }

        self.penalties = p.step();
        if let Some(centroid) = self.centroid.as_mut() {
            let c3s: Vec<&Array2<f64>> = self.states.iter().map(|s| &s.c3).collect();
            *centroid = match self.coupling {
                Coupling::Centroid => update_centroid(&c3s, &self.lambdas)?,
                _ => c3s[0].clone(),
            };
        }

        let (converged, residuals) = check_convergence(&self.states, &previous_a, cfg.epsilon);
        let reps: Vec<&Array2<f64>> = self.states.iter().map(|s| &s.c2).collect();
        let norms = reps
            .iter()
            .map(|c| linalg::nuclear_norm_from_gram(c.view()))
            .collect::<Result<Vec<_>>>()?;
        let objective = objective::objective_with_norms(
            &reps,
            Some(&norms),
            self.centroid.as_ref(),
            self.input,
            cfg,
        )?;

        self.report.iterations += 1;
        self.report.residual_trace.push(residuals);
        self.report.objective_trace.push(objective);
        self.report.mu_trace.push(p.mu2);
        self.report.converged = converged;
        Ok(converged)
    }

    pub fn finish(self) -> RepresentationResult {
        let centroid = self.centroid;
        let (views, consensus) = self
            .states
            .into_iter()
            .map(|s| (s.c2, s.c3))
            .unzip();
        RepresentationResult {
            views,
            consensus,
            centroid,
            report: self.report,
        }
    }
}

/// Runs the configured solver from zero initialization until every residual
/// is within `epsilon` or `max_iters` is reached. Hitting the cap is not an
/// error; the report is flagged `converged = false`.
pub fn solve(input: &SolveInput, config: &SolverConfig) -> Result<RepresentationResult> {
    let mut solver = Solver::new(input, config)?;
    for _ in 0..config.max_iters {
        if solver.step()? {
            break;
        }
    }
    Ok(solver.finish())
}
