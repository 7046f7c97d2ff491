//! Numerical integration, sampling and the Monte Carlo entropy oracle.

mod monte_carlo;
#[allow(clippy::excessive_precision)]
mod quadrature;

pub use monte_carlo::{entropy_integrand, entropy_mc, sample, sample_range, MCEstimate};
pub use quadrature::{integrate, Integrator, QuadratureResult, LOG_SUBSTITUTION_RATIO};
