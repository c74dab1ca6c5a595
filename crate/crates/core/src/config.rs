//! Solver hyperparameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Data-fidelity model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    /// Hard self-expression constraint `X = XC`.
    Exact,
    /// Squared-error self-expression penalty `½‖X − XC‖²`.
    Noisy,
}

/// How views are coupled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One view, no consensus term.
    #[serde(rename = "single")]
    SingleView,
    /// Pairwise agreement between every ordered pair of views.
    Pairwise,
    /// Agreement of every view with a shared centroid.
    Centroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Gaussian,
}

/// Kernel used in place of the raw inner products.
///
/// For the Gaussian kernel the bandwidth of each view is
/// `sigma_multiplier × median pairwise distance` of that view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub sigma_multiplier: f64,
}

impl KernelSpec {
    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            sigma_multiplier: 1.0,
        }
    }

    pub fn gaussian(sigma_multiplier: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Gaussian,
            sigma_multiplier,
        }
    }
}

/// Default tolerance for linear solvers.
pub const LINEAR_EPSILON: f64 = 1e-3;
/// Default tolerance for kernel solvers.
pub const KERNEL_EPSILON: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Nuclear-norm weight.
    pub beta1: f64,
    /// L1 weight.
    pub beta2: f64,
    /// Consensus weights, one per view or a single shared value.
    pub lambda: Vec<f64>,
    /// Initial value of every penalty parameter.
    pub mu_init: f64,
    pub rho: f64,
    pub mu_max: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub fidelity: Fidelity,
    pub mode: Mode,
    pub kernel: Option<KernelSpec>,
}

impl SolverConfig {
    /// Configuration with the reference defaults: `β1 = β2 = 0.5`, `λ = 0.5`,
    /// `μ = 100`, `ρ = 1.5` (1 for a single view), `μ_max = 1e6`, 100 iterations
    /// and `ε = 1e-3`.
    pub fn new(mode: Mode, fidelity: Fidelity) -> Self {
        SolverConfig {
            beta1: 0.5,
            beta2: 0.5,
            lambda: vec![0.5],
            mu_init: 100.0,
            rho: if mode == Mode::SingleView { 1.0 } else { 1.5 },
            mu_max: 1e6,
            epsilon: LINEAR_EPSILON,
            max_iters: 100,
            fidelity,
            mode,
            kernel: None,
        }
    }

    /// Kernelized configuration; fidelity is noisy and `ε = 1e-5`.
    pub fn kernel(mode: Mode, kernel: KernelSpec) -> Self {
        SolverConfig {
            epsilon: KERNEL_EPSILON,
            kernel: Some(kernel),
            ..SolverConfig::new(mode, Fidelity::Noisy)
        }
    }

    pub fn with_betas(mut self, beta1: f64, beta2: f64) -> Self {
        self.beta1 = beta1;
        self.beta2 = beta2;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = vec![lambda];
        self
    }

    pub fn with_mu(mut self, mu_init: f64) -> Self {
        self.mu_init = mu_init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.beta1 >= 0.0 && self.beta1.is_finite()) {
            return bad(format!("beta1 must be nonnegative, got {}", self.beta1));
        }
        if !(self.beta2 >= 0.0 && self.beta2.is_finite()) {
            return bad(format!("beta2 must be nonnegative, got {}", self.beta2));
        }
        if self.lambda.is_empty() {
            return bad("lambda must have at least one entry".into());
        }
        if let Some(l) = self.lambda.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
            return bad(format!("lambda must be nonnegative, got {l}"));
        }
        if !(self.mu_init > 0.0 && self.mu_init.is_finite()) {
            return bad(format!("mu_init must be positive, got {}", self.mu_init));
        }
        if !(self.mu_max > 0.0 && self.mu_max.is_finite()) {
            return bad(format!("mu_max must be positive, got {}", self.mu_max));
        }
        if self.mu_init > self.mu_max {
            return bad(format!(
                "mu_init {} exceeds mu_max {}",
                self.mu_init, self.mu_max
            ));
        }
        if !(self.rho >= 1.0 && self.rho.is_finite()) {
            return bad(format!("rho must be at least 1, got {}", self.rho));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        if let Some(kernel) = &self.kernel {
            if self.fidelity == Fidelity::Exact {
                return bad("kernel solvers require noisy fidelity".into());
            }
            if !(kernel.sigma_multiplier > 0.0 && kernel.sigma_multiplier.is_finite()) {
                return bad(format!(
                    "sigma multiplier must be positive, got {}",
                    kernel.sigma_multiplier
                ));
            }
        }
        Ok(())
    }

    /// Per-view consensus weights; a single value is shared by all views.
    pub fn lambdas(&self, n_views: usize) -> Result<Vec<f64>> {
        match self.lambda.len() {
            1 => Ok(vec![self.lambda[0]; n_views]),
            len if len == n_views => Ok(self.lambda.clone()),
            len => Err(Error::InvalidConfig(format!(
                "{len} lambda values for {n_views} views"
            ))),
        }
    }

    pub fn is_kernel(&self) -> bool {
        self.kernel.is_some()
    }
}
