//! One-dimensional probability densities built from closed-form pieces.
//!
//! A [`PiecewiseDensity`] is an ordered list of open intervals, each carrying
//! a pure evaluator. The density is zero outside the union of the pieces and
//! at the outer support endpoints. At a knot shared by two adjacent pieces the
//! value is the mean of the two one-sided evaluator values, so a continuous
//! density keeps its value there.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::calculus::Integrator;
use crate::error::{domain, Error, Result};

/// Gaussian pieces are cut at `mu ± GAUSSIAN_TRUNCATION_SIGMAS * sigma`.
/// The discarded mass is below 1e-300.
pub const GAUSSIAN_TRUNCATION_SIGMAS: f64 = 40.0;

/// Exponential pieces are cut at `EXPONENTIAL_TRUNCATION_RATE / lambda`,
/// where the tail mass `e^{-700}` is below 1e-300.
pub const EXPONENTIAL_TRUNCATION_RATE: f64 = 700.0;

/// Largest accepted `t = ln b` for the truncated Pareto family.
pub const MAX_LOG_B: f64 = 700.0;

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Endpoint behaviour of a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    None,
    LogSingular,
    Removable,
}

/// Shape hint used by [`sup_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// Monotone (or constant) on the piece; the supremum is an endpoint limit.
    Monotone,
    Unimodal { mode: f64 },
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    EvenAboutZero,
    None,
}

/// Sign of the second summand in a convolution: `X + Y` or `X - Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Provenance of a density: which family, with which parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Density `1/(x ln b)` on `(1, b)`, parametrised by `log_b = ln b`.
    TruncatedPareto { log_b: f64 },
    /// Density `(beta - 1) x^{-beta}` on `(1, ∞)`.
    Pareto { beta: f64 },
    Gaussian { mu: f64, sigma2: f64 },
    Uniform { a: f64, b: f64 },
    Exponential { lambda: f64 },
    /// Law of `X_b + Y_b` for independent truncated Pareto copies.
    TruncatedParetoSum { log_b: f64 },
    /// Law of `X_b - Y_b` for independent truncated Pareto copies.
    TruncatedParetoDifference { log_b: f64 },
    /// Law of `scale * X + shift`.
    Affine {
        base: Box<Family>,
        scale: f64,
        shift: f64,
    },
    /// Numerically convolved law of `left ± right`.
    Convolution {
        left: Box<Family>,
        right: Box<Family>,
        sign: Sign,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::TruncatedPareto { log_b } => write!(f, "truncated_pareto(b=e^{log_b})"),
            Family::Pareto { beta } => write!(f, "pareto(beta={beta})"),
            Family::Gaussian { mu, sigma2 } => write!(f, "gaussian({mu}, {sigma2})"),
            Family::Uniform { a, b } => write!(f, "uniform({a}, {b})"),
            Family::Exponential { lambda } => write!(f, "exponential({lambda})"),
            Family::TruncatedParetoSum { log_b } => {
                write!(f, "truncated_pareto_sum(b=e^{log_b})")
            }
            Family::TruncatedParetoDifference { log_b } => {
                write!(f, "truncated_pareto_difference(b=e^{log_b})")
            }
            Family::Affine { base, scale, shift } => write!(f, "{scale}*[{base}]+{shift}"),
            Family::Convolution { left, right, sign } => match sign {
                Sign::Plus => write!(f, "[{left}] + [{right}]"),
                Sign::Minus => write!(f, "[{left}] - [{right}]"),
            },
        }
    }
}

/// Accuracy of the piece evaluators: `|error| <= abs + rel * value`.
///
/// Zero for closed forms; positive for densities whose evaluator performs a
/// quadrature per call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl EvalTolerance {
    pub fn is_exact(&self) -> bool {
        self.abs == 0.0 && self.rel == 0.0
    }
}

/// Support cut applied to a family with unbounded tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub lo: f64,
    pub hi: f64,
    /// Upper bound on the probability mass discarded by the cut.
    pub tail_mass_bound: f64,
}

#[derive(Clone)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub smoothness: Smoothness,
    pub shape: Shape,
    eval: Evaluator,
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Piece")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("smoothness", &self.smoothness)
            .field("shape", &self.shape)
            .finish_non_exhaustive()
    }
}

impl Piece {
    pub fn new(lo: f64, hi: f64, smoothness: Smoothness, shape: Shape, eval: Evaluator) -> Self {
        Self {
            lo,
            hi,
            smoothness,
            shape,
            eval,
        }
    }

    /// Raw evaluator value; callers are responsible for staying inside `(lo, hi)`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn evaluator(&self) -> Evaluator {
        Arc::clone(&self.eval)
    }

    fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// A probability density on the real line given as ordered closed-form pieces.
#[derive(Debug, Clone)]
pub struct PiecewiseDensity {
    pieces: Vec<Piece>,
    symmetry: Symmetry,
    family: Option<Family>,
    truncation: Option<Truncation>,
    eval_tolerance: EvalTolerance,
}

impl PiecewiseDensity {
    /// Assembles a density from pieces, which must be ordered and disjoint.
    pub fn new(pieces: Vec<Piece>, symmetry: Symmetry, family: Option<Family>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(domain("a density needs at least one piece"));
        }
        for p in &pieces {
            if p.lo.is_nan() || p.hi.is_nan() || p.lo >= p.hi {
                return Err(domain(format!("invalid piece interval ({}, {})", p.lo, p.hi)));
            }
        }
        for w in pieces.windows(2) {
            if w[0].hi > w[1].lo {
                return Err(domain("pieces must be ordered and pairwise disjoint"));
            }
        }
        Ok(Self {
            pieces,
            symmetry,
            family,
            truncation: None,
            eval_tolerance: EvalTolerance::default(),
        })
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = Some(truncation);
        self
    }

    pub fn with_eval_tolerance(mut self, tol: EvalTolerance) -> Self {
        self.eval_tolerance = tol;
        self
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    pub fn truncation(&self) -> Option<Truncation> {
        self.truncation
    }

    pub fn eval_tolerance(&self) -> EvalTolerance {
        self.eval_tolerance
    }

    /// Closed hull `[lo, hi]` of the pieces.
    pub fn support(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    /// Piece boundaries, ascending and deduplicated.
    pub fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.lo, p.hi])
            .collect();
        k.dedup();
        k
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return 0.0;
        }
        let i = self.pieces.partition_point(|p| p.hi <= x);
        let Some(piece) = self.pieces.get(i) else {
            return 0.0;
        };
        if piece.contains(x) {
            return nonnegative(piece.eval(x));
        }
        // x == piece.lo: either a gap boundary, the support start, or a junction.
        if i > 0 && self.pieces[i - 1].hi == x && piece.lo == x {
            let l = self.pieces[i - 1].eval(x);
            let r = piece.eval(x);
            return match (l.is_finite(), r.is_finite()) {
                (true, true) => nonnegative(0.5 * (l + r)),
                (true, false) => nonnegative(l),
                (false, true) => nonnegative(r),
                (false, false) => f64::NAN,
            };
        }
        0.0
    }
}

/// Clamps roundoff-negative values to zero but lets NaN (a failed evaluator)
/// through.
#[inline]
fn nonnegative(v: f64) -> f64 {
    if v < 0.0 {
        0.0
    } else {
        v
    }
}

/// Density value at `x` (zero outside the support).
pub fn pdf(d: &PiecewiseDensity, x: f64) -> f64 {
    d.pdf(x)
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite, got {v}")))
    }
}

/// Truncated Pareto law with density `1/(x ln b)` on `(1, b)`, `b = e^{log_b}`.
pub fn truncated_pareto(log_b: f64) -> Result<PiecewiseDensity> {
    check_finite("log_b", log_b)?;
    if log_b <= 0.0 {
        return Err(domain(format!("truncated Pareto needs b > 1 (ln b > 0), got ln b = {log_b}")));
    }
    if log_b > MAX_LOG_B {
        return Err(domain(format!("ln b = {log_b} exceeds the representable range")));
    }
    let b = log_b.exp();
    let piece = Piece::new(
        1.0,
        b,
        Smoothness::None,
        Shape::Monotone,
        Arc::new(move |x| 1.0 / (x * log_b)),
    );
    PiecewiseDensity::new(
        vec![piece],
        Symmetry::None,
        Some(Family::TruncatedPareto { log_b }),
    )
}

/// Pareto law with density `(beta - 1) x^{-beta}` on `(1, ∞)`.
pub fn pareto(beta: f64) -> Result<PiecewiseDensity> {
    check_finite("beta", beta)?;
    if beta <= 1.0 {
        return Err(domain(format!("Pareto density is not integrable for beta = {beta} <= 1")));
    }
    let piece = Piece::new(
        1.0,
        f64::INFINITY,
        Smoothness::None,
        Shape::Monotone,
        Arc::new(move |x: f64| (beta - 1.0) * x.powf(-beta)),
    );
    PiecewiseDensity::new(vec![piece], Symmetry::None, Some(Family::Pareto { beta }))
}

pub fn gaussian(mu: f64, sigma2: f64) -> Result<PiecewiseDensity> {
    check_finite("mu", mu)?;
    check_finite("sigma2", sigma2)?;
    if sigma2 <= 0.0 {
        return Err(domain(format!("Gaussian variance must be positive, got {sigma2}")));
    }
    let sigma = sigma2.sqrt();
    let norm = 1.0 / (2.0 * PI * sigma2).sqrt();
    let half_width = GAUSSIAN_TRUNCATION_SIGMAS * sigma;
    let (lo, hi) = (mu - half_width, mu + half_width);
    let piece = Piece::new(
        lo,
        hi,
        Smoothness::None,
        Shape::Unimodal { mode: mu },
        Arc::new(move |x| {
            let z = x - mu;
            norm * (-z * z / (2.0 * sigma2)).exp()
        }),
    );
    let symmetry = if mu == 0.0 {
        Symmetry::EvenAboutZero
    } else {
        Symmetry::None
    };
    Ok(
        PiecewiseDensity::new(vec![piece], symmetry, Some(Family::Gaussian { mu, sigma2 }))?
            .with_truncation(Truncation {
                lo,
                hi,
                tail_mass_bound: 1e-300,
            }),
    )
}

pub fn uniform(a: f64, b: f64) -> Result<PiecewiseDensity> {
    check_finite("a", a)?;
    check_finite("b", b)?;
    if b <= a {
        return Err(domain(format!("uniform needs a < b, got ({a}, {b})")));
    }
    let h = 1.0 / (b - a);
    let piece = Piece::new(a, b, Smoothness::None, Shape::Monotone, Arc::new(move |_| h));
    let symmetry = if a == -b {
        Symmetry::EvenAboutZero
    } else {
        Symmetry::None
    };
    PiecewiseDensity::new(vec![piece], symmetry, Some(Family::Uniform { a, b }))
}

pub fn exponential(lambda: f64) -> Result<PiecewiseDensity> {
    check_finite("lambda", lambda)?;
    if lambda <= 0.0 {
        return Err(domain(format!("exponential rate must be positive, got {lambda}")));
    }
    let hi = EXPONENTIAL_TRUNCATION_RATE / lambda;
    let piece = Piece::new(
        0.0,
        hi,
        Smoothness::None,
        Shape::Monotone,
        Arc::new(move |x| lambda * (-lambda * x).exp()),
    );
    Ok(
        PiecewiseDensity::new(vec![piece], Symmetry::None, Some(Family::Exponential { lambda }))?
            .with_truncation(Truncation {
                lo: 0.0,
                hi,
                tail_mass_bound: 1e-300,
            }),
    )
}

/// Density of `a X + c`.
pub fn affine_transform(d: &PiecewiseDensity, a: f64, c: f64) -> Result<PiecewiseDensity> {
    check_finite("a", a)?;
    check_finite("c", c)?;
    if a == 0.0 {
        return Err(domain("affine scale must be nonzero"));
    }
    let map = |x: f64| a * x + c;
    let inv_abs = 1.0 / a.abs();
    let mut pieces: Vec<Piece> = d
        .pieces
        .iter()
        .map(|p| {
            let (lo, hi) = if a > 0.0 {
                (map(p.lo), map(p.hi))
            } else {
                (map(p.hi), map(p.lo))
            };
            let inner = p.evaluator();
            let shape = match p.shape {
                Shape::Unimodal { mode } => Shape::Unimodal { mode: map(mode) },
                s => s,
            };
            Piece::new(
                lo,
                hi,
                p.smoothness,
                shape,
                Arc::new(move |y| inner((y - c) / a) * inv_abs),
            )
        })
        .collect();
    if a < 0.0 {
        pieces.reverse();
    }
    let symmetry = if d.symmetry == Symmetry::EvenAboutZero && c == 0.0 {
        Symmetry::EvenAboutZero
    } else {
        Symmetry::None
    };
    let family = d.family.as_ref().map(|f| match f {
        Family::Affine { base, scale, shift } => Family::Affine {
            base: base.clone(),
            scale: a * scale,
            shift: a * shift + c,
        },
        other => Family::Affine {
            base: Box::new(other.clone()),
            scale: a,
            shift: c,
        },
    });
    let mut out = PiecewiseDensity::new(pieces, symmetry, family)?
        .with_eval_tolerance(d.eval_tolerance);
    out.truncation = d.truncation.map(|t| {
        let (lo, hi) = if a > 0.0 {
            (map(t.lo), map(t.hi))
        } else {
            (map(t.hi), map(t.lo))
        };
        Truncation {
            lo,
            hi,
            tail_mass_bound: t.tail_mass_bound,
        }
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Convexity classification

/// Where a density sits in the `V^{-beta}` hierarchy (dimension one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityClassification {
    /// `None` when the exponent is not known analytically; `+∞` for log-concave.
    pub beta: Option<f64>,
    /// `-1/(beta - 1)`, or 0 in the log-concave limit.
    pub kappa: Option<f64>,
    pub is_convex_measure: bool,
}

impl ConvexityClassification {
    pub fn from_beta(beta: f64) -> Self {
        let kappa = if beta.is_infinite() {
            0.0
        } else if beta > 1.0 {
            -1.0 / (beta - 1.0)
        } else {
            f64::NEG_INFINITY
        };
        Self {
            beta: Some(beta),
            kappa: Some(kappa),
            is_convex_measure: beta >= 1.0,
        }
    }

    pub fn log_concave() -> Self {
        Self::from_beta(f64::INFINITY)
    }

    pub fn is_log_concave(&self) -> bool {
        self.beta == Some(f64::INFINITY)
    }
}

/// Analytic classification from the family tag, when one is known.
pub fn classify(d: &PiecewiseDensity) -> Option<ConvexityClassification> {
    d.family.as_ref().and_then(classify_family)
}

fn classify_family(f: &Family) -> Option<ConvexityClassification> {
    match f {
        Family::Pareto { beta } => Some(ConvexityClassification::from_beta(*beta)),
        Family::Gaussian { .. } | Family::Uniform { .. } | Family::Exponential { .. } => {
            Some(ConvexityClassification::log_concave())
        }
        Family::TruncatedPareto { .. } => Some(ConvexityClassification {
            beta: None,
            kappa: None,
            is_convex_measure: true,
        }),
        Family::Affine { base, .. } => classify_family(base),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Supremum

const GOLDEN_REL_TOL: f64 = 1e-12;
const SCAN_POINTS: usize = 64;

/// Essential supremum of the density; `+∞` for an unbounded density.
pub fn sup_density(d: &PiecewiseDensity) -> f64 {
    d.pieces
        .iter()
        .map(piece_sup)
        .fold(0.0, f64::max)
}

fn endpoint_limit(p: &Piece, x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    let v = p.eval(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v.max(0.0)
    }
}

fn piece_sup(p: &Piece) -> f64 {
    let ends = endpoint_limit(p, p.lo).max(endpoint_limit(p, p.hi));
    match p.shape {
        Shape::Monotone => ends,
        Shape::Unimodal { mode } => ends.max(p.eval(mode)),
        Shape::Unknown => ends.max(scan_and_refine(p)),
    }
}

fn scan_and_refine(p: &Piece) -> f64 {
    let (lo, hi) = (p.lo.max(-1e300), p.hi.min(1e300));
    let geometric = lo > 0.0 && hi > 1e4 * lo;
    let point = |i: usize| {
        let s = i as f64 / (SCAN_POINTS + 1) as f64;
        if geometric {
            (lo.ln() + s * (hi.ln() - lo.ln())).exp()
        } else {
            lo + s * (hi - lo)
        }
    };
    let mut best = 1;
    let mut best_v = f64::NEG_INFINITY;
    for i in 1..=SCAN_POINTS {
        let v = p.eval(point(i));
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    let (a, b) = (point(best - 1), point(best + 1));
    best_v.max(golden_max(|x| p.eval(x), a, b))
}

/// Golden-section maximisation on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= GOLDEN_REL_TOL * (c.abs() + d.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

// ---------------------------------------------------------------------------
// Moments

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

impl Moments {
    fn from_mean_var(mean: f64, variance: f64) -> Self {
        Self {
            mean,
            second_moment: variance + mean * mean,
            variance,
        }
    }
}

/// Mean, second moment and variance; closed form when the family admits one.
pub fn moments(d: &PiecewiseDensity) -> Result<Moments> {
    match d.family.as_ref().map(family_moments) {
        Some(Some(m)) => m,
        _ => numeric_moments(d),
    }
}

fn family_moments(f: &Family) -> Option<Result<Moments>> {
    let m = match f {
        Family::TruncatedPareto { log_b } => Ok(truncated_pareto_moments(*log_b)),
        Family::Pareto { beta } => {
            let beta = *beta;
            if beta <= 3.0 {
                Err(Error::InfiniteMoment(format!(
                    "pareto(beta={beta}) has no finite second moment"
                )))
            } else {
                let mean = (beta - 1.0) / (beta - 2.0);
                let second = (beta - 1.0) / (beta - 3.0);
                Ok(Moments {
                    mean,
                    second_moment: second,
                    variance: second - mean * mean,
                })
            }
        }
        Family::Gaussian { mu, sigma2 } => Ok(Moments::from_mean_var(*mu, *sigma2)),
        Family::Uniform { a, b } => Ok(Moments::from_mean_var(
            0.5 * (a + b),
            (b - a) * (b - a) / 12.0,
        )),
        Family::Exponential { lambda } => {
            Ok(Moments::from_mean_var(1.0 / lambda, 1.0 / (lambda * lambda)))
        }
        Family::TruncatedParetoSum { log_b } => {
            let m = truncated_pareto_moments(*log_b);
            Ok(Moments::from_mean_var(2.0 * m.mean, 2.0 * m.variance))
        }
        Family::TruncatedParetoDifference { log_b } => {
            let m = truncated_pareto_moments(*log_b);
            Ok(Moments::from_mean_var(0.0, 2.0 * m.variance))
        }
        Family::Affine { base, scale, shift } => family_moments(base)?.map(|m| {
            Moments::from_mean_var(scale * m.mean + shift, scale * scale * m.variance)
        }),
        Family::Convolution { left, right, sign } => {
            let l = family_moments(left)?;
            let r = family_moments(right)?;
            l.and_then(|l| {
                r.map(|r| {
                    Moments::from_mean_var(l.mean + sign.factor() * r.mean, l.variance + r.variance)
                })
            })
        }
    };
    Some(m)
}

/// `E X_b = (b-1)/ln b`, `E X_b^2 = (b^2-1)/(2 ln b)`.
fn truncated_pareto_moments(t: f64) -> Moments {
    let mean = t.exp_m1() / t;
    let second = (2.0 * t).exp_m1() / (2.0 * t);
    // Var = (b-1)/t * [(b+1)/2 - (b-1)/t]
    let variance = mean * (0.5 * (t.exp() + 1.0) - mean);
    Moments {
        mean,
        second_moment: second,
        variance,
    }
}

fn numeric_moments(d: &PiecewiseDensity) -> Result<Moments> {
    let q = Integrator::relative(1e-12).with_max_subdivisions(50_000);
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for p in &d.pieces {
        let r1 = q.integrate(|x| x * p.eval(x), p.lo, p.hi)?;
        let r2 = q.integrate(|x| x * x * p.eval(x), p.lo, p.hi)?;
        if !(r1.converged && r2.converged) {
            return Err(if p.hi.is_infinite() || p.lo.is_infinite() {
                Error::InfiniteMoment("moment integral did not converge on an unbounded piece".into())
            } else {
                Error::Inconclusive("moment quadrature did not converge".into())
            });
        }
        m1 += r1.value;
        m2 += r2.value;
    }
    Ok(Moments {
        mean: m1,
        second_moment: m2,
        variance: m2 - m1 * m1,
    })
}

// ---------------------------------------------------------------------------
// Distribution function and its inverse

/// `P(X <= x)`.
pub fn cdf(d: &PiecewiseDensity, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let (lo, hi) = d.support();
    if x <= lo {
        return 0.0;
    }
    if x >= hi {
        return 1.0;
    }
    let v = match d.family.as_ref().and_then(|f| family_cdf(f, x)) {
        Some(v) => v,
        None => numeric_cdf(d, x),
    };
    v.clamp(0.0, 1.0)
}

fn family_cdf(f: &Family, x: f64) -> Option<f64> {
    Some(match f {
        Family::TruncatedPareto { log_b } => {
            if x <= 1.0 {
                0.0
            } else {
                (x.ln() / log_b).min(1.0)
            }
        }
        Family::Pareto { beta } => {
            if x <= 1.0 {
                0.0
            } else {
                -((1.0 - beta) * x.ln()).exp_m1()
            }
        }
        Family::Gaussian { mu, sigma2 } => standard_normal().cdf((x - mu) / sigma2.sqrt()),
        Family::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
        Family::Exponential { lambda } => {
            if x <= 0.0 {
                0.0
            } else {
                -(-lambda * x).exp_m1()
            }
        }
        Family::Affine { base, scale, shift } => {
            let y = (x - shift) / scale;
            let v = family_cdf(base, y)?;
            if *scale > 0.0 {
                v
            } else {
                1.0 - v
            }
        }
        _ => return None,
    })
}

fn numeric_cdf(d: &PiecewiseDensity, x: f64) -> f64 {
    let q = Integrator::new(1e-14).with_rel_tol(1e-12);
    let mut acc = 0.0;
    for p in &d.pieces {
        if p.lo >= x {
            break;
        }
        let hi = p.hi.min(x);
        if let Ok(r) = q.integrate(|y| p.eval(y), p.lo, hi) {
            acc += r.value;
        }
    }
    acc
}

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Quantile function on the open unit interval.
pub fn inverse_cdf(d: &PiecewiseDensity, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(domain(format!("quantile level must lie in (0, 1), got {u}")));
    }
    let (lo, hi) = d.support();
    let x = match d.family.as_ref().and_then(|f| family_quantile(f, u)) {
        Some(x) => x,
        None => bisect_quantile(d, u),
    };
    Ok(x.clamp(lo, hi))
}

fn family_quantile(f: &Family, u: f64) -> Option<f64> {
    Some(match f {
        Family::TruncatedPareto { log_b } => (u * log_b).exp(),
        Family::Pareto { beta } => (-(-u).ln_1p() / (beta - 1.0)).exp(),
        Family::Gaussian { mu, sigma2 } => mu + sigma2.sqrt() * standard_normal().inverse_cdf(u),
        Family::Uniform { a, b } => a + u * (b - a),
        Family::Exponential { lambda } => -(-u).ln_1p() / lambda,
        Family::Affine { base, scale, shift } => {
            let v = if *scale > 0.0 { u } else { 1.0 - u };
            scale * family_quantile(base, v)? + shift
        }
        _ => return None,
    })
}

fn bisect_quantile(d: &PiecewiseDensity, u: f64) -> f64 {
    let (mut lo, mut hi) = d.support();
    if lo.is_infinite() {
        lo = -1.0;
        while cdf(d, lo) > u {
            lo *= 2.0;
        }
    }
    if hi.is_infinite() {
        hi = 1.0_f64.max(lo + 1.0);
        while cdf(d, hi) < u {
            hi *= 2.0;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(d, mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
