use epilab::calculus::Integrator;
use epilab::convolution::{
    convolve, convolve_numeric, diff_density_truncated_pareto, sum_density_truncated_pareto,
    ConvolutionConfig,
};
use epilab::density::{affine_transform, gaussian, truncated_pareto, uniform, PiecewiseDensity, Sign};
use proptest::prelude::*;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn mass(d: &PiecewiseDensity) -> f64 {
    let q = Integrator::new(1e-12);
    d.pieces()
        .iter()
        .map(|p| q.integrate(|x| p.eval(x), p.lo, p.hi).unwrap().value)
        .sum()
}

fn probe_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| lo + (hi - lo) * (0.5 + i as f64 * GOLDEN).fract())
        .collect()
}

#[test]
fn closed_forms_integrate_to_one() {
    for t in [1.0, 2.0, 4.0, 8.0] {
        let s = mass(&sum_density_truncated_pareto(t).unwrap());
        let d = mass(&diff_density_truncated_pareto(t).unwrap());
        assert!((s - 1.0).abs() <= 1e-8, "t={t}: sum mass {s}");
        assert!((d - 1.0).abs() <= 1e-8, "t={t}: difference mass {d}");
    }
}

#[test]
fn closed_forms_agree_with_numeric_convolution() {
    let cfg = ConvolutionConfig::default();
    for t in [1.0, 2.0, 4.0, 8.0] {
        let b = f64::exp(t);
        let x = truncated_pareto(t).unwrap();
        let sum = sum_density_truncated_pareto(t).unwrap();
        let num_sum = convolve_numeric(&x, &x, Sign::Plus, cfg).unwrap();
        for p in probe_points(2.0, 2.0 * b, 50) {
            let (a, n) = (sum.pdf(p), num_sum.pdf(p));
            assert!((a - n).abs() <= 1e-7, "t={t} sum at {p}: {a} vs {n}");
        }
        let diff = diff_density_truncated_pareto(t).unwrap();
        let num_diff = convolve_numeric(&x, &x, Sign::Minus, cfg).unwrap();
        for p in probe_points(1.0 - b, b - 1.0, 50) {
            let (a, n) = (diff.pdf(p), num_diff.pdf(p));
            assert!((a - n).abs() <= 1e-7, "t={t} difference at {p}: {a} vs {n}");
        }
    }
}

#[test]
fn removable_singularity_at_zero() {
    for t in [1.0, 2.0, 8.0, 40.0] {
        let b = f64::exp(t);
        let d = diff_density_truncated_pareto(t).unwrap();
        let h0 = (1.0 - 1.0 / b) / (t * t);
        assert!((d.pdf(0.0) - h0).abs() <= 1e-15 * h0);
        for x in [1e-12, 1e-9, 1e-7, 2e-6, 1e-4] {
            let x_num = convolve_numeric(
                &truncated_pareto(t).unwrap(),
                &truncated_pareto(t).unwrap(),
                Sign::Minus,
                ConvolutionConfig::default(),
            )
            .unwrap()
            .pdf(x);
            assert!((d.pdf(x) - x_num).abs() <= 1e-10 * h0.max(1e-3), "t={t} x={x}");
            assert_eq!(d.pdf(x), d.pdf(-x));
        }
    }
}

#[test]
fn sum_density_is_continuous_at_the_interior_knot() {
    for t in [1.0, 2.0, 8.0, 16.0] {
        let b = f64::exp(t);
        let s = sum_density_truncated_pareto(t).unwrap();
        let pieces = s.pieces();
        let left = pieces[0].eval(b + 1.0);
        let right = pieces[1].eval(b + 1.0);
        assert!((left - right).abs() <= 1e-12, "t={t}: {left} vs {right}");
        assert!((left - right).abs() <= 1e-10 * left, "t={t}: {left} vs {right}");
        assert!((left - 2.0 / ((b + 1.0) * t)).abs() <= 1e-10 * left);
    }
}

#[test]
fn numeric_gaussian_and_uniform_examples() {
    let u = uniform(0.0, 1.0).unwrap();
    let tri = convolve_numeric(&u, &u, Sign::Plus, ConvolutionConfig::default()).unwrap();
    assert!((tri.pdf(1.0) - 1.0).abs() <= 1e-10);
    let g = gaussian(0.0, 1.0).unwrap();
    let n2 = convolve_numeric(&g, &g, Sign::Plus, ConvolutionConfig::default()).unwrap();
    let peak = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    assert!((n2.pdf(0.0) - peak).abs() <= 1e-10);
}

#[test]
fn reflected_sum_dispatches_to_the_difference() {
    let x = truncated_pareto(2.0).unwrap();
    let minus_y = affine_transform(&x, -1.0, 0.0).unwrap();
    let via_sum = convolve(&x, &minus_y, Sign::Plus, ConvolutionConfig::default()).unwrap();
    let diff = diff_density_truncated_pareto(2.0).unwrap();
    for p in probe_points(-6.0, 6.0, 20) {
        assert!((via_sum.pdf(p) - diff.pdf(p)).abs() <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sum_density_at_most_one(t in 1.0..300.0f64, u in 0.0..1.0f64, log_scale: bool) {
        let b = t.exp();
        let s = sum_density_truncated_pareto(t).unwrap();
        let x = if log_scale {
            (2f64.ln() + u * (2.0 * b).ln() - u * 2f64.ln()).exp()
        } else {
            2.0 + u * (2.0 * b - 2.0)
        };
        prop_assert!(s.pdf(x) <= 1.0);
    }

    #[test]
    fn sum_density_at_most_reciprocal_on_lower_range(t in 2.0..300.0f64, u in 0.0..1.0f64) {
        let s = sum_density_truncated_pareto(t).unwrap();
        let x = (2f64.ln() + u * (t - 2f64.ln())).exp();
        if x > 2.0 && x < t.exp() {
            prop_assert!(s.pdf(x) <= 1.0 / x, "x={} g={}", x, s.pdf(x));
        }
    }

    #[test]
    fn difference_density_at_most_reciprocal(t in 2.0..300.0f64, u in 0.0..1.0f64) {
        let b = t.exp();
        let d = diff_density_truncated_pareto(t).unwrap();
        let x = (u * (b - 1.0).ln()).exp();
        if x > 0.0 && x < b - 1.0 {
            let h = d.pdf(x);
            prop_assert!(h <= 1.0 / x, "x={} h={}", x, h);
            prop_assert!(h < 1.0);
        }
    }
}
