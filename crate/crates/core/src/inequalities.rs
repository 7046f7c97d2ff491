//! Checkers for the entropy inequalities, each returning an auditable verdict.
//!
//! Every verdict compares `lhs <= rhs`. `margin = rhs - lhs`, and the numeric
//! slack is four times the coefficient-weighted sum of the quadrature error
//! estimates that entered either side. Entropy-power comparisons are made on
//! `ln H = 2h` so that they survive parameters like `b = e^300`.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::convolution::{
    convolve, diff_density_truncated_pareto, sum_density_truncated_pareto, ConvolutionConfig,
};
use crate::density::{affine_transform, sup_density, PiecewiseDensity, Shape, Sign};
use crate::entropy::{entropy_closed_form_truncated_pareto, EntropyEngine, EntropyReport};
use crate::error::{domain, Error, Result};

/// Multiplier applied to the summed error estimates.
pub const SAFETY_FACTOR: f64 = 4.0;

/// Default gap between "holds within slack" and "violated".
pub const DEFAULT_REPORT_TOL: f64 = 1e-9;

/// Relative accuracy assumed for a supremum found by golden-section search.
const SEARCHED_SUP_REL_ERR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Violated,
    Inconclusive,
}

/// Scale on which `lhs` and `rhs` are expressed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Nats,
    /// `ln H = 2h`.
    LogEntropyPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub entropy_tol: f64,
    pub report_tol: f64,
    pub safety_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    #[serde(rename = "slack")]
    pub numeric_slack: f64,
    pub status: Status,
    pub inputs: BTreeMap<String, Value>,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub units: Units,
}

impl InequalityVerdict {
    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }
}

/// `holds` iff `margin >= -slack`; `violated` iff `margin < -slack - report_tol`.
pub fn classify_margin(margin: f64, slack: f64, report_tol: f64) -> Status {
    if margin.is_nan() || slack.is_nan() {
        Status::Inconclusive
    } else if margin >= -slack {
        Status::Holds
    } else if margin < -slack - report_tol {
        Status::Violated
    } else {
        Status::Inconclusive
    }
}

/// Whether the density-of-`X - Y` shape hypothesis was asserted by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Asserted,
    NotAsserted,
}

/// One side of a verdict: a linear combination of entropies plus a constant.
struct Side {
    value: f64,
    error: f64,
    conclusive: bool,
}

impl Side {
    fn constant(value: f64) -> Self {
        Self {
            value,
            error: 0.0,
            conclusive: true,
        }
    }

    fn entropy(term: &Term, coef: f64) -> Self {
        match term {
            Some(r) => Self {
                value: coef * r.h,
                error: coef.abs() * r.abs_error,
                conclusive: true,
            },
            None => Self {
                value: f64::NAN,
                error: f64::NAN,
                conclusive: false,
            },
        }
    }

    fn plus(self, other: Side) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            conclusive: self.conclusive && other.conclusive,
        }
    }

    fn add(self, c: f64) -> Self {
        Self {
            value: self.value + c,
            ..self
        }
    }
}

/// `None` marks a numerically inconclusive entropy.
type Term = Option<EntropyReport>;

/// Evaluation settings shared by all checkers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checker {
    pub engine: EntropyEngine,
    pub convolution: ConvolutionConfig,
    pub report_tol: f64,
}

impl Default for Checker {
    fn default() -> Self {
        Self {
            engine: EntropyEngine::default(),
            convolution: ConvolutionConfig::default(),
            report_tol: DEFAULT_REPORT_TOL,
        }
    }
}

fn family_value(d: &PiecewiseDensity) -> Value {
    match d.family() {
        Some(f) => serde_json::to_value(f).unwrap_or(Value::Null),
        None => Value::Null,
    }
}

fn sup_error(d: &PiecewiseDensity) -> f64 {
    if d.pieces().iter().any(|p| p.shape == Shape::Unknown) {
        SEARCHED_SUP_REL_ERR
    } else {
        0.0
    }
}

impl Checker {
    pub fn new(tol: f64) -> Self {
        Self {
            engine: EntropyEngine::new(tol),
            ..Self::default()
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            entropy_tol: self.engine.tol,
            report_tol: self.report_tol,
            safety_factor: SAFETY_FACTOR,
        }
    }

    /// Entropy, or `None` when the numerics could not produce a trustworthy value.
    fn term(&self, d: &PiecewiseDensity) -> Result<Term> {
        match self.engine.entropy(d) {
            Ok(r) if r.converged && r.h.is_finite() => Ok(Some(r)),
            Ok(_) => Ok(None),
            Err(Error::NonFiniteIntegrand { .. } | Error::Inconclusive(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn convolve(&self, a: &PiecewiseDensity, b: &PiecewiseDensity, sign: Sign) -> Result<PiecewiseDensity> {
        convolve(a, b, sign, self.convolution)
    }

    fn verdict(
        &self,
        name: &str,
        lhs: Side,
        rhs: Side,
        units: Units,
        inputs: BTreeMap<String, Value>,
    ) -> InequalityVerdict {
        let margin = rhs.value - lhs.value;
        let slack = SAFETY_FACTOR * (lhs.error + rhs.error);
        let status = if lhs.conclusive && rhs.conclusive {
            classify_margin(margin, slack, self.report_tol)
        } else {
            Status::Inconclusive
        };
        InequalityVerdict {
            name: name.to_string(),
            lhs: lhs.value,
            rhs: rhs.value,
            margin,
            numeric_slack: slack,
            status,
            inputs,
            tolerances: self.tolerances(),
            units,
        }
    }

    /// `H(X) + H(Y) <= H(X + Y)`, compared as `ln(H(X) + H(Y)) <= 2h(X+Y)`.
    pub fn check_epi(&self, x: &PiecewiseDensity, y: &PiecewiseDensity) -> Result<InequalityVerdict> {
        let sum = self.convolve(x, y, Sign::Plus)?;
        let (hx, hy, hs) = (self.term(x)?, self.term(y)?, self.term(&sum)?);
        let lhs = match (&hx, &hy) {
            (Some(a), Some(b)) => {
                let (p, q) = (a.log_entropy_power, b.log_entropy_power);
                let m = p.max(q);
                Side {
                    value: m + ((p - m).exp() + (q - m).exp()).ln(),
                    error: 2.0 * a.abs_error.max(b.abs_error),
                    conclusive: true,
                }
            }
            _ => Side::entropy(&None, 1.0),
        };
        let rhs = Side::entropy(&hs, 2.0);
        let inputs = BTreeMap::from([
            ("X".to_string(), family_value(x)),
            ("Y".to_string(), family_value(y)),
        ]);
        Ok(self.verdict("epi", lhs, rhs, Units::LogEntropyPower, inputs))
    }

    /// `ln(1/||f||∞) <= h(X)`, valid for every density.
    pub fn check_maxnorm_lower(&self, d: &PiecewiseDensity) -> Result<InequalityVerdict> {
        let sup = sup_density(d);
        let h = self.term(d)?;
        let lhs = Side {
            value: -sup.ln(),
            error: sup_error(d),
            conclusive: !sup.is_nan(),
        };
        let inputs = BTreeMap::from([("X".to_string(), family_value(d))]);
        Ok(self.verdict("maxnorm_lower", lhs, Side::entropy(&h, 1.0), Units::Nats, inputs))
    }

    /// Both halves of `ln(1/||f||∞) <= h(X) <= c + ln(1/||f||∞)` with
    /// `c = beta0/(beta0 - 1)`, for a density of the form `V^{-beta}`.
    pub fn check_lemma1(
        &self,
        d: &PiecewiseDensity,
        beta: f64,
        beta0: f64,
    ) -> Result<(InequalityVerdict, InequalityVerdict)> {
        if !(beta0 > 1.0) {
            return Err(domain(format!("beta0 must exceed 1, got {beta0}")));
        }
        if !(beta >= 2.0_f64.max(beta0)) {
            return Err(domain(format!(
                "lemma needs beta >= max(2, beta0) = {}, got beta = {beta}",
                2.0_f64.max(beta0)
            )));
        }
        let c = beta0 / (beta0 - 1.0);
        let sup = sup_density(d);
        let h = self.term(d)?;
        let mut inputs = BTreeMap::from([
            ("X".to_string(), family_value(d)),
            ("beta".to_string(), json!(beta)),
            ("beta0".to_string(), json!(beta0)),
        ]);
        let lower = {
            let lhs = Side {
                value: -sup.ln(),
                error: sup_error(d),
                conclusive: !sup.is_nan(),
            };
            self.verdict("lemma1_lower", lhs, Side::entropy(&h, 1.0), Units::Nats, inputs.clone())
        };
        inputs.insert("c".to_string(), json!(c));
        let rhs = Side {
            value: c - sup.ln(),
            error: sup_error(d),
            conclusive: !sup.is_nan(),
        };
        let upper = self.verdict("lemma1_upper", Side::entropy(&h, 1.0), rhs, Units::Nats, inputs);
        Ok((lower, upper))
    }

    /// `h(X+Y+Z) + h(Z) <= h(X+Z) + h(Y+Z)`.
    pub fn check_submodularity(
        &self,
        x: &PiecewiseDensity,
        y: &PiecewiseDensity,
        z: &PiecewiseDensity,
    ) -> Result<InequalityVerdict> {
        let xy = self.convolve(x, y, Sign::Plus)?;
        let xyz = self.convolve(&xy, z, Sign::Plus)?;
        let xz = self.convolve(x, z, Sign::Plus)?;
        let yz = self.convolve(y, z, Sign::Plus)?;
        let lhs = Side::entropy(&self.term(&xyz)?, 1.0).plus(Side::entropy(&self.term(z)?, 1.0));
        let rhs = Side::entropy(&self.term(&xz)?, 1.0).plus(Side::entropy(&self.term(&yz)?, 1.0));
        let inputs = BTreeMap::from([
            ("X".to_string(), family_value(x)),
            ("Y".to_string(), family_value(y)),
            ("Z".to_string(), family_value(z)),
        ]);
        Ok(self.verdict("submodularity", lhs, rhs, Units::Nats, inputs))
    }

    /// `h(X+Y) + h(X) <= 2 h(X-Y)` for independent copies `X, Y`.
    pub fn check_sum_difference(&self, x: &PiecewiseDensity) -> Result<InequalityVerdict> {
        let sum = self.convolve(x, x, Sign::Plus)?;
        let diff = self.convolve(x, x, Sign::Minus)?;
        let lhs = Side::entropy(&self.term(&sum)?, 1.0).plus(Side::entropy(&self.term(x)?, 1.0));
        let rhs = Side::entropy(&self.term(&diff)?, 2.0);
        let inputs = BTreeMap::from([("X".to_string(), family_value(x))]);
        Ok(self.verdict("sum_difference", lhs, rhs, Units::Nats, inputs))
    }

    /// `H(X-Y) <= D H(X)` and `H(X+Y) <= D² H(X)` with
    /// `D = exp(2 beta0/(beta0 - 1))`, for independent copies `X, Y`.
    ///
    /// The shape hypothesis on the law of `X - Y` is not verified here; the
    /// caller's assertion is recorded in the verdict inputs.
    pub fn check_theorem2(
        &self,
        x: &PiecewiseDensity,
        beta0: f64,
        hypothesis: Hypothesis,
    ) -> Result<(InequalityVerdict, InequalityVerdict)> {
        if !(beta0 > 1.0) {
            return Err(domain(format!("beta0 must exceed 1, got {beta0}")));
        }
        let log_d = 2.0 * beta0 / (beta0 - 1.0);
        let diff = self.convolve(x, x, Sign::Minus)?;
        let sum = self.convolve(x, x, Sign::Plus)?;
        let hx = self.term(x)?;
        let inputs = BTreeMap::from([
            ("X".to_string(), family_value(x)),
            ("beta0".to_string(), json!(beta0)),
            ("hypothesis".to_string(), json!(hypothesis)),
        ]);
        let d = self.verdict(
            "theorem2_difference",
            Side::entropy(&self.term(&diff)?, 2.0),
            Side::entropy(&hx, 2.0).add(log_d),
            Units::LogEntropyPower,
            inputs.clone(),
        );
        let s = self.verdict(
            "theorem2_sum",
            Side::entropy(&self.term(&sum)?, 2.0),
            Side::entropy(&hx, 2.0).add(2.0 * log_d),
            Units::LogEntropyPower,
            inputs,
        );
        Ok((d, s))
    }

    /// `h(X-Y) <= h(X) + 1` and `h(X+Y) <= h(X) + 2` for log-concave `X`
    /// (caller-asserted), `Y` an independent copy.
    pub fn check_corollary1(&self, x: &PiecewiseDensity) -> Result<(InequalityVerdict, InequalityVerdict)> {
        let diff = self.convolve(x, x, Sign::Minus)?;
        let sum = self.convolve(x, x, Sign::Plus)?;
        let hx = self.term(x)?;
        let inputs = BTreeMap::from([
            ("X".to_string(), family_value(x)),
            ("hypothesis".to_string(), json!("log-concave asserted")),
        ]);
        let d = self.verdict(
            "corollary1_difference",
            Side::entropy(&self.term(&diff)?, 1.0),
            Side::entropy(&hx, 1.0).add(1.0),
            Units::Nats,
            inputs.clone(),
        );
        let s = self.verdict(
            "corollary1_sum",
            Side::entropy(&self.term(&sum)?, 1.0),
            Side::entropy(&hx, 1.0).add(2.0),
            Units::Nats,
            inputs,
        );
        Ok((d, s))
    }

    /// `D(X+Y) <= max(D(X), D(Y))`.
    pub fn check_epi_d_form(&self, x: &PiecewiseDensity, y: &PiecewiseDensity) -> Result<InequalityVerdict> {
        let sum = self.convolve(x, y, Sign::Plus)?;
        let d = |p: &PiecewiseDensity| -> Result<Side> {
            match self.engine.d_report(p) {
                Ok((v, r)) => Ok(Side {
                    value: v,
                    error: r.abs_error,
                    conclusive: true,
                }),
                Err(Error::Inconclusive(_) | Error::NonFiniteIntegrand { .. }) => {
                    Ok(Side::entropy(&None, 1.0))
                }
                Err(e) => Err(e),
            }
        };
        let (dx, dy, ds) = (d(x)?, d(y)?, d(&sum)?);
        let rhs = if dx.value >= dy.value { dx } else { dy };
        let inputs = BTreeMap::from([
            ("X".to_string(), family_value(x)),
            ("Y".to_string(), family_value(y)),
        ]);
        Ok(self.verdict("epi_d_form", ds, rhs, Units::Nats, inputs))
    }

    /// Lower bounds on `h(X_b ± Y_b)` from the truncated Pareto construction,
    /// `b = e^t`, `t >= 2`:
    ///
    /// * `h(X_b+Y_b) > 2t/3 - ln 2`
    /// * `2h(X_b+Y_b) > ln ½ + 4t/3`
    /// * `2h(X_b+Y_b) - 2h(X_b) > t/3 - ln(2t)`
    /// * `h(X_b-Y_b) > (2/t²)[⅓(L³ - ln³2) - ½ ln 2 (L² - ln²2)]`, `L = t - ln 2`
    pub fn check_theorem3_bounds(&self, log_b: f64) -> Result<Vec<InequalityVerdict>> {
        check_log_b(log_b)?;
        let hs = self.quadrature_entropy(&sum_density_truncated_pareto(log_b)?)?;
        let hd = self.quadrature_entropy(&diff_density_truncated_pareto(log_b)?)?;
        self.theorem3_verdicts(log_b, hs, hd)
    }

    /// Entropy by quadrature even where a closed form exists; `None` when
    /// the quadrature did not converge or met a non-finite value.
    pub fn quadrature_entropy(&self, d: &PiecewiseDensity) -> Result<Option<EntropyReport>> {
        match self.engine.quadrature_only().entropy(d) {
            Ok(r) if r.converged && r.h.is_finite() => Ok(Some(r)),
            Ok(_) | Err(Error::NonFiniteIntegrand { .. } | Error::Inconclusive(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// The verdicts of [`Checker::check_theorem3_bounds`] from precomputed
    /// entropies of the sum and difference; `None` marks an inconclusive one.
    pub fn theorem3_verdicts(
        &self,
        log_b: f64,
        hs: Option<EntropyReport>,
        hd: Option<EntropyReport>,
    ) -> Result<Vec<InequalityVerdict>> {
        check_log_b(log_b)?;
        let t = log_b;
        let hx = entropy_closed_form_truncated_pareto(t)?;
        let inputs = BTreeMap::from([("log_b".to_string(), json!(t))]);

        let l = t - LN_2;
        let diff_bound = 2.0 / (t * t)
            * ((l.powi(3) - LN_2.powi(3)) / 3.0 - 0.5 * LN_2 * (l * l - LN_2 * LN_2));
        Ok(vec![
            self.verdict(
                "theorem3_sum_entropy",
                Side::constant(2.0 * t / 3.0 - LN_2),
                Side::entropy(&hs, 1.0),
                Units::Nats,
                inputs.clone(),
            ),
            self.verdict(
                "theorem3_sum_entropy_power",
                Side::constant(0.5f64.ln() + 4.0 * t / 3.0),
                Side::entropy(&hs, 2.0),
                Units::LogEntropyPower,
                inputs.clone(),
            ),
            self.verdict(
                "theorem3_sum_ratio",
                Side::constant(t / 3.0 - (2.0 * t).ln()),
                Side::entropy(&hs, 2.0).add(-2.0 * hx),
                Units::LogEntropyPower,
                inputs.clone(),
            ),
            self.verdict(
                "theorem3_difference_entropy",
                Side::constant(diff_bound),
                Side::entropy(&hd, 1.0),
                Units::Nats,
                inputs,
            ),
        ])
    }
}

fn check_log_b(log_b: f64) -> Result<()> {
    if log_b >= 2.0 && log_b.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("bounds need b >= e² (ln b >= 2), got ln b = {log_b}")))
    }
}

/// Reflection `-X`, handy for building `Z = -Y'` in submodularity checks.
pub fn reflect(d: &PiecewiseDensity) -> Result<PiecewiseDensity> {
    affine_transform(d, -1.0, 0.0)
}

pub fn check_epi(x: &PiecewiseDensity, y: &PiecewiseDensity) -> Result<InequalityVerdict> {
    Checker::default().check_epi(x, y)
}

pub fn check_lemma1(
    d: &PiecewiseDensity,
    beta: f64,
    beta0: f64,
) -> Result<(InequalityVerdict, InequalityVerdict)> {
    Checker::default().check_lemma1(d, beta, beta0)
}

pub fn check_submodularity(
    x: &PiecewiseDensity,
    y: &PiecewiseDensity,
    z: &PiecewiseDensity,
) -> Result<InequalityVerdict> {
    Checker::default().check_submodularity(x, y, z)
}

pub fn check_theorem2(
    x: &PiecewiseDensity,
    beta0: f64,
    hypothesis: Hypothesis,
) -> Result<(InequalityVerdict, InequalityVerdict)> {
    Checker::default().check_theorem2(x, beta0, hypothesis)
}

pub fn check_corollary1(x: &PiecewiseDensity) -> Result<(InequalityVerdict, InequalityVerdict)> {
    Checker::default().check_corollary1(x)
}

pub fn check_epi_d_form(x: &PiecewiseDensity, y: &PiecewiseDensity) -> Result<InequalityVerdict> {
    Checker::default().check_epi_d_form(x, y)
}

pub fn check_theorem3_bounds(log_b: f64) -> Result<Vec<InequalityVerdict>> {
    Checker::default().check_theorem3_bounds(log_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{exponential, gaussian, pareto, truncated_pareto, uniform};
    use approx::assert_relative_eq;

    #[test]
    fn status_rule() {
        assert_eq!(classify_margin(0.0, 0.0, 1e-9), Status::Holds);
        assert_eq!(classify_margin(-1e-10, 1e-9, 1e-9), Status::Holds);
        assert_eq!(classify_margin(-1.5e-9, 1e-9, 1e-9), Status::Inconclusive);
        assert_eq!(classify_margin(-3e-9, 1e-9, 1e-9), Status::Violated);
        assert_eq!(classify_margin(f64::NAN, 0.0, 1e-9), Status::Inconclusive);
    }

    #[test]
    fn gaussian_epi_is_tight() {
        let g = gaussian(0.0, 1.0).unwrap();
        let v = check_epi(&g, &g).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert!(v.margin.abs() <= 1e-8);
        assert_eq!(v.units, Units::LogEntropyPower);
    }

    #[test]
    fn lemma1_preconditions_are_enforced() {
        let p = pareto(2.0).unwrap();
        assert!(check_lemma1(&p, 2.0, 1.0).is_err());
        assert!(check_lemma1(&p, 1.5, 1.5).is_err());
        assert!(check_lemma1(&p, 2.0, 3.0).is_err());
    }

    #[test]
    fn lemma1_upper_bound_is_attained_by_pareto() {
        for beta in [2.0, 3.0] {
            let (lower, upper) = check_lemma1(&pareto(beta).unwrap(), beta, beta).unwrap();
            assert_eq!(lower.status, Status::Holds);
            assert_eq!(upper.status, Status::Holds);
            assert!(upper.margin.abs() <= 1e-6);
        }
        let (lower, _) = check_lemma1(&pareto(2.0).unwrap(), 2.0, 2.0).unwrap();
        assert_relative_eq!(lower.rhs, 2.0, max_relative = 1e-14);
        assert_relative_eq!(lower.lhs, 0.0);
    }

    #[test]
    fn maxnorm_lower_on_exponential() {
        let v = Checker::default().check_maxnorm_lower(&exponential(1.0).unwrap()).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert_relative_eq!(v.lhs, 0.0, epsilon = 1e-15);
        assert_relative_eq!(v.rhs, 1.0);
    }

    #[test]
    fn gaussian_submodularity_margin() {
        let g = gaussian(0.0, 1.0).unwrap();
        let v = check_submodularity(&g, &g, &g).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert_relative_eq!(v.margin, 0.5 * (4.0f64 / 3.0).ln(), epsilon = 1e-12);
    }

    #[test]
    fn theorem2_gaussian() {
        let g = gaussian(0.0, 1.0).unwrap();
        let (d, s) = check_theorem2(&g, 2.0, Hypothesis::Asserted).unwrap();
        assert_eq!(d.status, Status::Holds);
        assert_eq!(s.status, Status::Holds);
        // ln D = 4 at beta0 = 2, and H(X-Y) = 2 H(X).
        assert_relative_eq!(d.margin, 4.0 - 2f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(s.margin, 8.0 - 2f64.ln(), epsilon = 1e-12);
        assert_eq!(d.inputs["hypothesis"], json!("asserted"));
    }

    #[test]
    fn corollary1_gaussian_margin() {
        let (d, s) = check_corollary1(&gaussian(0.0, 1.0).unwrap()).unwrap();
        assert_relative_eq!(d.margin, 1.0 - 0.5 * 2f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(s.margin, 2.0 - 0.5 * 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn d_form_gaussian_pair() {
        let g = gaussian(0.0, 1.0).unwrap();
        let v = check_epi_d_form(&g, &g).unwrap();
        assert_eq!(v.lhs, 0.0);
        assert_eq!(v.rhs, 0.0);
        assert_eq!(v.status, Status::Holds);
        assert!(check_epi_d_form(&pareto(2.5).unwrap(), &g).is_err());
    }

    #[test]
    fn theorem3_domain() {
        assert!(check_theorem3_bounds(1.5).is_err());
    }

    #[test]
    fn verdict_json_has_exact_fields() {
        let u = uniform(0.0, 1.0).unwrap();
        let v = Checker::default().check_maxnorm_lower(&u).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        let mut keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["inputs", "lhs", "margin", "name", "rhs", "slack", "status", "tolerances"]);
        assert_eq!(json["status"], json!("holds"));
        let back: InequalityVerdict = serde_json::from_value(json).unwrap();
        assert_eq!(back.margin, v.margin);
        let tp = truncated_pareto(2.0).unwrap();
        let v = Checker::default().check_maxnorm_lower(&tp).unwrap();
        assert_eq!(v.inputs["X"]["family"], json!("truncated_pareto"));
    }
}
