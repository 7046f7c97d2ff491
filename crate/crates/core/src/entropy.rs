//! Differential entropy (nats), entropy power, and the entropic distance to
//! normality `D(X) = h(Z) - h(X)` for the moment-matched Gaussian `Z`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::calculus::{Integrator, MCEstimate};
use crate::density::{moments, Family, PiecewiseDensity};
use crate::error::{domain, Error, Result};

/// Default absolute tolerance for entropy quadrature.
pub const DEFAULT_ENTROPY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// Differential entropy with provenance. `log_entropy_power = 2h` (dimension one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub h: f64,
    pub log_entropy_power: f64,
    pub method: EntropyMethod,
    pub abs_error: f64,
    /// False when the quadrature ran out of budget; `h` is then unreliable.
    pub converged: bool,
}

impl EntropyReport {
    pub fn new(h: f64, method: EntropyMethod, abs_error: f64, converged: bool) -> Self {
        Self {
            h,
            log_entropy_power: 2.0 * h,
            method,
            abs_error,
            converged,
        }
    }

    fn closed_form(h: f64) -> Self {
        Self::new(h, EntropyMethod::ClosedForm, 4.0 * f64::EPSILON * h.abs().max(1.0), true)
    }

    /// Wraps a Monte Carlo estimate; the error is three standard errors.
    pub fn from_monte_carlo(est: &MCEstimate) -> Self {
        Self::new(est.value, EntropyMethod::MonteCarlo, 3.0 * est.std_error, true)
    }
}

/// `H = e^{2h}`. Overflows to `+∞` for large `h`; use `log_entropy_power` there.
pub fn entropy_power(report: &EntropyReport) -> f64 {
    report.log_entropy_power.exp()
}

/// `h(X_b) = ln ln b + ½ ln b`, evaluated from `log_b = ln b`.
pub fn entropy_closed_form_truncated_pareto(log_b: f64) -> Result<f64> {
    if !(log_b.is_finite() && log_b > 0.0) {
        return Err(domain(format!("need b > 1 (ln b > 0), got ln b = {log_b}")));
    }
    Ok(log_b.ln() + 0.5 * log_b)
}

/// Exact entropy for families that have one.
pub fn closed_form_entropy(family: &Family) -> Option<f64> {
    Some(match family {
        Family::TruncatedPareto { log_b } => log_b.ln() + 0.5 * log_b,
        Family::Pareto { beta } => -(beta - 1.0).ln() + beta / (beta - 1.0),
        Family::Gaussian { sigma2, .. } => gaussian_entropy(*sigma2),
        Family::Uniform { a, b } => (b - a).ln(),
        Family::Exponential { lambda } => 1.0 - lambda.ln(),
        Family::Affine { base, scale, .. } => closed_form_entropy(base)? + scale.abs().ln(),
        _ => return None,
    })
}

/// `½ ln(2πe σ²)`.
pub fn gaussian_entropy(variance: f64) -> f64 {
    0.5 * (2.0 * PI * E * variance).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMode {
    /// Closed form when the family has one, quadrature otherwise.
    Auto,
    QuadratureOnly,
}

/// Entropy evaluation settings shared by the checkers and experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEngine {
    pub tol: f64,
    pub mode: EntropyMode,
    pub max_subdivisions: usize,
}

impl Default for EntropyEngine {
    fn default() -> Self {
        Self::new(DEFAULT_ENTROPY_TOL)
    }
}

impl EntropyEngine {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            mode: EntropyMode::Auto,
            max_subdivisions: 20_000,
        }
    }

    pub fn quadrature_only(mut self) -> Self {
        self.mode = EntropyMode::QuadratureOnly;
        self
    }

    pub fn entropy(&self, d: &PiecewiseDensity) -> Result<EntropyReport> {
        if self.mode == EntropyMode::Auto {
            if let Some(h) = d.family().and_then(closed_form_entropy) {
                return Ok(EntropyReport::closed_form(h));
            }
        }
        self.quadrature(d)
    }

    fn quadrature(&self, d: &PiecewiseDensity) -> Result<EntropyReport> {
        if !(self.tol > 0.0) {
            return Err(domain("entropy tolerance must be positive"));
        }
        let pieces = d.pieces();
        let q = Integrator::new(self.tol / pieces.len() as f64)
            .with_max_subdivisions(self.max_subdivisions);
        let mut h = 0.0;
        let mut err = 0.0;
        let mut converged = true;
        for p in pieces {
            let r = q.integrate(
                |x| {
                    let v = p.eval(x);
                    if v > 0.0 {
                        -v * v.ln()
                    } else if v.is_nan() {
                        v
                    } else {
                        0.0
                    }
                },
                p.lo,
                p.hi,
            )?;
            h += r.value;
            err += r.abs_error_estimate;
            converged &= r.converged;
        }
        let tol = d.eval_tolerance();
        if !tol.is_exact() {
            err += propagated_error(d, tol.abs, tol.rel)?;
        }
        Ok(EntropyReport::new(h, EntropyMethod::Quadrature, err, converged))
    }

    /// `D(X) = ½ ln(2πe Var X) - h(X)`.
    pub fn d_to_normality(&self, d: &PiecewiseDensity) -> Result<f64> {
        Ok(self.d_report(d)?.0)
    }

    /// `D(X)` together with the entropy report it was computed from.
    pub fn d_report(&self, d: &PiecewiseDensity) -> Result<(f64, EntropyReport)> {
        let m = moments(d).map_err(|e| match e {
            Error::InfiniteMoment(msg) => Error::Domain(format!("infinite variance: {msg}")),
            other => other,
        })?;
        if !(m.variance.is_finite() && m.variance > 0.0) {
            return Err(domain(format!("variance must be finite and positive, got {}", m.variance)));
        }
        let report = self.entropy(d)?;
        if !report.converged {
            return Err(Error::Inconclusive("entropy quadrature did not converge".into()));
        }
        let gap = gaussian_entropy(m.variance) - report.h;
        let slack = 4.0 * report.abs_error + 1e-12 * report.h.abs().max(1.0);
        if gap < -slack {
            return Err(Error::Consistency(format!(
                "negative distance to normality {gap} (slack {slack})"
            )));
        }
        Ok((gap.max(0.0), report))
    }
}

/// Entropy error caused by inexact density values:
/// `∫ |1 + ln p| (abs + rel p) dx`.
fn propagated_error(d: &PiecewiseDensity, abs: f64, rel: f64) -> Result<f64> {
    let q = Integrator::relative(1e-3).with_max_subdivisions(2_000);
    let mut total = 0.0;
    for p in d.pieces() {
        let r = q.integrate(
            |x| {
                let v = p.eval(x);
                if v > 0.0 {
                    (1.0 + v.ln()).abs() * (abs + rel * v)
                } else {
                    0.0
                }
            },
            p.lo,
            p.hi,
        )?;
        total += r.value.abs() + r.abs_error_estimate;
    }
    Ok(total)
}

/// Entropy with closed forms where available, quadrature otherwise.
pub fn differential_entropy(d: &PiecewiseDensity, tol: f64) -> Result<EntropyReport> {
    EntropyEngine::new(tol).entropy(d)
}

/// Entropy by quadrature of `-p ln p`, ignoring any closed form.
pub fn entropy_by_quadrature(d: &PiecewiseDensity, tol: f64) -> Result<EntropyReport> {
    EntropyEngine::new(tol).quadrature_only().entropy(d)
}

/// `D(X)` with the default engine.
pub fn d_to_normality(d: &PiecewiseDensity) -> Result<f64> {
    EntropyEngine::default().d_to_normality(d)
}
