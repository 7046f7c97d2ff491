//! Densities of sums and differences of independent variables.
//!
//! The truncated Pareto family has exact two-piece sum and difference
//! densities. Everything else goes through [`convolve_numeric`], which
//! evaluates the convolution integral by adaptive quadrature at each point.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calculus::Integrator;
use crate::density::{
    gaussian, EvalTolerance, Family, Piece, PiecewiseDensity, Shape, Sign, Smoothness, Symmetry,
    MAX_LOG_B,
};
use crate::error::{domain, Result};

/// Below `SERIES_CUTOFF * min(1, b - 1)` the difference density is taken
/// from its Taylor expansion around the removable singularity at 0.
pub const SERIES_CUTOFF: f64 = 1e-6;

/// Accuracy of the per-point quadrature in [`convolve_numeric`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionConfig {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for ConvolutionConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_subdivisions: 4_000,
        }
    }
}

fn check_log_b(log_b: f64) -> Result<f64> {
    if !(log_b.is_finite() && log_b > 0.0) {
        return Err(domain(format!("need b > 1 (ln b > 0), got ln b = {log_b}")));
    }
    if log_b > MAX_LOG_B {
        return Err(domain(format!("ln b = {log_b} exceeds the representable range")));
    }
    Ok(log_b.exp())
}

/// Density `g` of `X_b + Y_b`, `b = e^{log_b}`:
///
/// * `2 ln(x-1) / (x ln²b)` on `(2, b+1)`
/// * `2 ln(b/(x-b)) / (x ln²b)` on `(b+1, 2b)`
pub fn sum_density_truncated_pareto(log_b: f64) -> Result<PiecewiseDensity> {
    let b = check_log_b(log_b)?;
    let k = 2.0 / (log_b * log_b);
    let rising = Piece::new(
        2.0,
        b + 1.0,
        Smoothness::LogSingular,
        Shape::Unknown,
        Arc::new(move |x: f64| k * (x - 2.0).ln_1p() / x),
    );
    let falling = Piece::new(
        b + 1.0,
        2.0 * b,
        Smoothness::LogSingular,
        Shape::Monotone,
        // ln(b/(x-b)) = -ln(1 + (x-2b)/b)
        Arc::new(move |x: f64| -k * ((x - 2.0 * b) / b).ln_1p() / x),
    );
    PiecewiseDensity::new(
        vec![rising, falling],
        Symmetry::None,
        Some(Family::TruncatedParetoSum { log_b }),
    )
}

/// Density `h` of `X_b - Y_b`: `ln((b-x)(x+1)/b) / (x ln²b)` for `0 < x < b-1`,
/// extended evenly, with `h(0) = (1 - 1/b)/ln²b`.
pub fn diff_density_truncated_pareto(log_b: f64) -> Result<PiecewiseDensity> {
    let b = check_log_b(log_b)?;
    let c = log_b.exp_m1();
    let eval: Arc<dyn Fn(f64) -> f64 + Send + Sync> =
        Arc::new(move |x: f64| diff_density_value(x.abs(), log_b, b, c));
    let left = Piece::new(-c, 0.0, Smoothness::Removable, Shape::Monotone, Arc::clone(&eval));
    let right = Piece::new(0.0, c, Smoothness::Removable, Shape::Monotone, eval);
    PiecewiseDensity::new(
        vec![left, right],
        Symmetry::EvenAboutZero,
        Some(Family::TruncatedParetoDifference { log_b }),
    )
}

/// `x >= 0`, `b = e^t`, `c = b - 1`.
fn diff_density_value(x: f64, t: f64, b: f64, c: f64) -> f64 {
    let t2 = t * t;
    // 1 - 1/b
    let r = -(-t).exp_m1();
    if x < SERIES_CUTOFF * c.min(1.0) {
        // ln(1 + y)/x with y = x r - x²/b, to second order in x.
        let a1 = 1.0 / b + 0.5 * r * r;
        let a2 = r / b + r * r * r / 3.0;
        return (r - x * a1 + x * x * a2) / t2;
    }
    // (b-x)(x+1)/b = 1 + x (b-1-x)/b
    let y = x * ((c - x) / b);
    y.ln_1p() / (x * t2)
}

/// Density of `X ± Y` for independent `X ~ d1`, `Y ~ d2`, evaluated lazily
/// by quadrature over the overlap of the supports.
///
/// The returned density is split at every sum (or difference) of knots of
/// the inputs, so each piece is smooth.
pub fn convolve_numeric(
    d1: &PiecewiseDensity,
    d2: &PiecewiseDensity,
    sign: Sign,
    config: ConvolutionConfig,
) -> Result<PiecewiseDensity> {
    let s = sign.factor();
    let (lo1, hi1) = d1.support();
    let (lo2, hi2) = d2.support();
    let (lo, hi) = match sign {
        Sign::Plus => (lo1 + lo2, hi1 + hi2),
        Sign::Minus => (lo1 - hi2, hi1 - lo2),
    };
    let knots1 = d1.knots();
    let knots2 = d2.knots();
    let mut knots: Vec<f64> = knots1
        .iter()
        .flat_map(|&k1| knots2.iter().map(move |&k2| k1 + s * k2))
        .filter(|k| k.is_finite() && *k > lo && *k < hi)
        .collect();
    knots.push(lo);
    knots.push(hi);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let inner = Integrator::relative(config.rel_tol).with_max_subdivisions(config.max_subdivisions);
    let a = Arc::new(d1.clone());
    let b = Arc::new(d2.clone());
    let eval: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(move |x: f64| {
        convolution_at(&a, &b, &knots1, &knots2, sign, &inner, x)
    });
    let pieces = knots
        .windows(2)
        .map(|w| Piece::new(w[0], w[1], Smoothness::None, Shape::Unknown, Arc::clone(&eval)))
        .collect();

    let symmetry = match sign {
        Sign::Minus if d1.family().is_some() && d1.family() == d2.family() => {
            Symmetry::EvenAboutZero
        }
        _ if d1.symmetry() == Symmetry::EvenAboutZero
            && d2.symmetry() == Symmetry::EvenAboutZero =>
        {
            Symmetry::EvenAboutZero
        }
        _ => Symmetry::None,
    };
    let family = match (d1.family(), d2.family()) {
        (Some(l), Some(r)) => Some(Family::Convolution {
            left: Box::new(l.clone()),
            right: Box::new(r.clone()),
            sign,
        }),
        _ => None,
    };
    let (t1, t2) = (d1.eval_tolerance(), d2.eval_tolerance());
    let tol = EvalTolerance {
        abs: t1.abs + t2.abs,
        rel: t1.rel + t2.rel + config.rel_tol,
    };
    Ok(PiecewiseDensity::new(pieces, symmetry, family)?.with_eval_tolerance(tol))
}

/// `∫ p1(x - s y) p2(y) dy`. Returns NaN if the inner quadrature fails, so the
/// failure surfaces in any enclosing integral instead of passing silently.
fn convolution_at(
    d1: &PiecewiseDensity,
    d2: &PiecewiseDensity,
    knots1: &[f64],
    knots2: &[f64],
    sign: Sign,
    inner: &Integrator,
    x: f64,
) -> f64 {
    let (lo1, hi1) = d1.support();
    let (lo2, hi2) = d2.support();
    // Values of y for which x - s y lies in supp d1.
    let (ylo, yhi) = match sign {
        Sign::Plus => (x - hi1, x - lo1),
        Sign::Minus => (lo1 - x, hi1 - x),
    };
    let (ylo, yhi) = (ylo.max(lo2), yhi.min(hi2));
    if ylo.is_nan() || yhi.is_nan() || ylo >= yhi {
        return 0.0;
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(knots1.len() + knots2.len() + 2);
    cuts.push(ylo);
    cuts.push(yhi);
    cuts.extend(knots2.iter().copied());
    cuts.extend(knots1.iter().map(|&k| match sign {
        Sign::Plus => x - k,
        Sign::Minus => k - x,
    }));
    cuts.retain(|c| *c >= ylo && *c <= yhi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let s = sign.factor();
    let integrand = |y: f64| d1.pdf(x - s * y) * d2.pdf(y);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        match inner.integrate(integrand, w[0], w[1]) {
            Ok(r) if r.converged => total += r.value,
            _ => return f64::NAN,
        }
    }
    total.max(0.0)
}

/// Density of `X ± Y`, using an exact form when one is known and
/// [`convolve_numeric`] otherwise.
pub fn convolve(
    d1: &PiecewiseDensity,
    d2: &PiecewiseDensity,
    sign: Sign,
    config: ConvolutionConfig,
) -> Result<PiecewiseDensity> {
    if let (Some(f1), Some(f2)) = (d1.family(), d2.family()) {
        if let Some(d) = closed_form(f1, f2, sign)? {
            return Ok(d);
        }
    }
    convolve_numeric(d1, d2, sign, config)
}

/// Mean and variance when the family is a normal law, possibly rescaled.
fn normal_parameters(f: &Family) -> Option<(f64, f64)> {
    match f {
        Family::Gaussian { mu, sigma2 } => Some((*mu, *sigma2)),
        Family::Affine { base, scale, shift } => {
            let (mu, sigma2) = normal_parameters(base)?;
            Some((scale * mu + shift, scale * scale * sigma2))
        }
        _ => None,
    }
}

fn closed_form(f1: &Family, f2: &Family, sign: Sign) -> Result<Option<PiecewiseDensity>> {
    use Family::*;
    if let (Some((m1, v1)), Some((m2, v2))) = (normal_parameters(f1), normal_parameters(f2)) {
        return Ok(Some(gaussian(m1 + sign.factor() * m2, v1 + v2)?));
    }
    Ok(match (f1, f2, sign) {
        (TruncatedPareto { log_b: t1 }, TruncatedPareto { log_b: t2 }, Sign::Plus) if t1 == t2 => {
            Some(sum_density_truncated_pareto(*t1)?)
        }
        (TruncatedPareto { log_b: t1 }, TruncatedPareto { log_b: t2 }, Sign::Minus)
            if t1 == t2 =>
        {
            Some(diff_density_truncated_pareto(*t1)?)
        }
        (TruncatedPareto { log_b: t1 }, Affine { base, scale, shift }, Sign::Plus)
            if *scale == -1.0 && *shift == 0.0 && **base == (TruncatedPareto { log_b: *t1 }) =>
        {
            Some(diff_density_truncated_pareto(*t1)?)
        }
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{truncated_pareto, uniform};
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn sum_density_point_values() {
        let g = sum_density_truncated_pareto(2.0).unwrap();
        assert_relative_eq!(g.pdf(3.0), 2.0 / (3.0 * 4.0) * 2f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(g.pdf(3.0), 0.115_524_5, epsilon = 1e-7);
        let b = E * E;
        let left = g.pieces()[0].eval(b + 1.0);
        let right = g.pieces()[1].eval(b + 1.0);
        let expected = 2.0 / ((b + 1.0) * 2.0);
        assert_relative_eq!(left, expected, max_relative = 1e-12);
        assert_relative_eq!(right, expected, max_relative = 1e-12);
        assert_relative_eq!(g.pdf(b + 1.0), 0.119_202_9, epsilon = 1e-7);
    }

    #[test]
    fn diff_density_point_values() {
        let h = diff_density_truncated_pareto(2.0).unwrap();
        assert_relative_eq!(h.pdf(0.0), (1.0 - (-2f64).exp()) / 4.0, max_relative = 1e-15);
        assert_relative_eq!(h.pdf(0.0), 0.216_166_2, epsilon = 1e-7);
        let b = E * E;
        let direct = 0.25 * ((b - 1.0) * 2.0 / b).ln();
        assert_relative_eq!(h.pdf(1.0), direct, max_relative = 1e-13);
        assert_relative_eq!(h.pdf(1.0), 0.136_933_4, epsilon = 1e-7);
    }

    #[test]
    fn series_branch_joins_the_direct_formula() {
        for t in [0.5, 2.0, 10.0] {
            let b: f64 = f64::exp(t);
            let c = f64::exp_m1(t);
            let edge = SERIES_CUTOFF * c.min(1.0);
            let below = diff_density_value(edge * (1.0 - 1e-9), t, b, c);
            let above = diff_density_value(edge * (1.0 + 1e-9), t, b, c);
            assert_relative_eq!(below, above, max_relative = 1e-12);
        }
    }

    #[test]
    fn diff_density_is_even() {
        let h = diff_density_truncated_pareto(3.0).unwrap();
        for i in 1..=100 {
            let x = i as f64 * 0.19;
            assert_eq!(h.pdf(x), h.pdf(-x));
        }
    }

    #[test]
    fn numeric_examples() {
        let u = uniform(0.0, 1.0).unwrap();
        let tri = convolve_numeric(&u, &u, Sign::Plus, ConvolutionConfig::default()).unwrap();
        assert_relative_eq!(tri.pdf(1.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(tri.pdf(0.25), 0.25, max_relative = 1e-12);
        let g = gaussian(0.0, 1.0).unwrap();
        let gg = convolve_numeric(&g, &g, Sign::Plus, ConvolutionConfig::default()).unwrap();
        assert_relative_eq!(gg.pdf(0.0), 1.0 / (4.0 * std::f64::consts::PI).sqrt(), max_relative = 1e-10);
        let tp = truncated_pareto(2.0).unwrap();
        let num = convolve_numeric(&tp, &tp, Sign::Plus, ConvolutionConfig::default()).unwrap();
        let exact = sum_density_truncated_pareto(2.0).unwrap();
        assert!((num.pdf(3.0) - exact.pdf(3.0)).abs() < 1e-8);
    }

    #[test]
    fn empty_overlap_is_zero() {
        let u = uniform(0.0, 1.0).unwrap();
        let tri = convolve_numeric(&u, &u, Sign::Plus, ConvolutionConfig::default()).unwrap();
        assert_eq!(tri.pdf(2.5), 0.0);
        assert_eq!(tri.pdf(-0.5), 0.0);
    }

    #[test]
    fn dispatch_prefers_closed_forms() {
        let cfg = ConvolutionConfig::default();
        let tp = truncated_pareto(2.0).unwrap();
        let s = convolve(&tp, &tp, Sign::Plus, cfg).unwrap();
        assert_eq!(s.family(), Some(&Family::TruncatedParetoSum { log_b: 2.0 }));
        let d = convolve(&tp, &tp, Sign::Minus, cfg).unwrap();
        assert_eq!(d.family(), Some(&Family::TruncatedParetoDifference { log_b: 2.0 }));
        let g = convolve(&gaussian(1.0, 2.0).unwrap(), &gaussian(0.5, 1.0).unwrap(), Sign::Minus, cfg)
            .unwrap();
        assert_eq!(g.family(), Some(&Family::Gaussian { mu: 0.5, sigma2: 3.0 }));
        let u = uniform(0.0, 1.0).unwrap();
        let n = convolve(&u, &u, Sign::Plus, cfg).unwrap();
        assert!(matches!(n.family(), Some(Family::Convolution { .. })));
        assert!(!n.eval_tolerance().is_exact());
    }

    #[test]
    fn domain_errors() {
        assert!(sum_density_truncated_pareto(0.0).is_err());
        assert!(diff_density_truncated_pareto(-1.0).is_err());
    }
}
