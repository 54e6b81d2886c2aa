//! Adaptive Gauss-Kronrod integration, the semi-infinite momentum policy and the
//! seeded Monte Carlo estimator over the Gaussian wavepacket.

mod adaptive;
mod monte_carlo;
mod semi_infinite;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use adaptive::{
    composite_gauss_legendre, integrate_1d, integrate_complex, ComplexEstimate, QuadValue,
};
pub use monte_carlo::{mc_gaussian_expectation, GaussianSamples, McEstimate};
pub use semi_infinite::{initial_window, integrate_semi_infinite_k, MAX_DOUBLINGS};

pub(crate) use adaptive::{integrate_adaptive, Adaptive, Nested};
pub(crate) use semi_infinite::integrate_semi_infinite_generic;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper limit on the number of panels in one adaptive integral.
    pub max_subdiv: usize,
    /// Initial panels per local oscillation period.
    pub panels_per_period: usize,
    /// Stop the k-tail once a doubling window adds less than this fraction.
    pub k_cutoff_rel: f64,
    pub mc_samples: usize,
    pub mc_seed: u64,
    /// Per-axis truncation of the momentum samples, in units of `√2/L`.
    pub mc_sigma_trunc: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_subdiv: 20_000,
            panels_per_period: 8,
            k_cutoff_rel: 1e-6,
            mc_samples: 200_000,
            mc_seed: 0x5eed_0001,
            mc_sigma_trunc: 3.5,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.rel_tol) || !positive(self.abs_tol) || !positive(self.k_cutoff_rel) {
            return Err(invalid("quadrature tolerances must be finite and > 0"));
        }
        if self.max_subdiv == 0 || self.panels_per_period == 0 || self.mc_samples == 0 {
            return Err(invalid("quadrature counts must be >= 1"));
        }
        if !positive(self.mc_sigma_trunc) {
            return Err(invalid("mc_sigma_trunc must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Default for IntegralEstimate {
    fn default() -> Self {
        Self::zero()
    }
}

impl IntegralEstimate {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            est_error: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    /// Turns an unconverged estimate into `QuadratureNoConvergence`.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::QuadratureNoConvergence {
                value: self.value,
                est_error: self.est_error,
                evaluations: self.evaluations,
            })
        }
    }
}
