//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::{E, LN_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use epilab::calculus::{entropy_mc, Integrator};
use epilab::convolution::{
    convolve, convolve_numeric, diff_density_truncated_pareto, sum_density_truncated_pareto, ConvolutionConfig,
};
use epilab::density::{exponential, gaussian, pareto, truncated_pareto, uniform, PiecewiseDensity, Sign};
use epilab::entropy::{differential_entropy, entropy_by_quadrature};
use epilab::experiment::{run_d_experiment, DEFAULT_T_GRID};
use epilab::inequalities::{Checker, Status};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))
}

fn library() -> [(&'static str, PiecewiseDensity); 4] {
    [
        ("gaussian", gaussian(0.0, 1.0).unwrap()),
        ("uniform", uniform(0.0, 1.0).unwrap()),
        ("exponential", exponential(1.0).unwrap()),
        ("truncated_pareto(e^2)", truncated_pareto(2.0).unwrap()),
    ]
}

fn mass(d: &PiecewiseDensity) -> f64 {
    let q = Integrator::new(1e-12);
    d.pieces()
        .iter()
        .map(|p| q.integrate(|x| p.eval(x), p.lo, p.hi).unwrap().value)
        .sum()
}

fn probes(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |i| lo + (hi - lo) * (0.5 + i as f64 * 0.618_033_988_749_894_8).fract())
}

fn c1_entropy_closed_form_vs_quadrature() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for t in [1.0, 2.0, 4.0, 8.0] {
        let exact = f64::ln(t) + t / 2.0;
        let d = truncated_pareto(t).unwrap();
        let cf = differential_entropy(&d, 1e-10).map_err(|e| e.to_string())?;
        let q = entropy_by_quadrature(&d, 1e-10).map_err(|e| e.to_string())?;
        ensure(q.converged, format!("quadrature did not converge at t={t}"))?;
        worst = worst.max((cf.h - exact).abs()).max((q.h - exact).abs());
    }
    ensure(worst <= 1e-8, format!("max deviation {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("max |h - (ln t + t/2)| = {worst:.1e} in {:?}", start.elapsed()))
}

fn c2_convolution_correctness() -> Check {
    let start = Instant::now();
    let cfg = ConvolutionConfig::default();
    let (mut mass_err, mut point_err) = (0.0f64, 0.0f64);
    for t in [1.0, 2.0, 4.0] {
        let b = f64::exp(t);
        let x = truncated_pareto(t).unwrap();
        let sum = sum_density_truncated_pareto(t).unwrap();
        let diff = diff_density_truncated_pareto(t).unwrap();
        mass_err = mass_err.max((mass(&sum) - 1.0).abs()).max((mass(&diff) - 1.0).abs());
        let num_sum = convolve_numeric(&x, &x, Sign::Plus, cfg).unwrap();
        let num_diff = convolve_numeric(&x, &x, Sign::Minus, cfg).unwrap();
        for p in probes(2.0, 2.0 * b, 50) {
            point_err = point_err.max((sum.pdf(p) - num_sum.pdf(p)).abs());
        }
        for p in probes(1.0 - b, b - 1.0, 50) {
            point_err = point_err.max((diff.pdf(p) - num_diff.pdf(p)).abs());
        }
    }
    ensure(mass_err <= 1e-8, format!("mass error {mass_err:e}"))?;
    ensure(point_err <= 1e-7, format!("pointwise error {point_err:e}"))?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "mass error {mass_err:.1e}, max oracle gap {point_err:.1e} in {:?}",
        start.elapsed()
    ))
}

fn c3_point_values() -> Check {
    let mut worst = 0.0f64;
    for t in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let b = f64::exp(t);
        let g = sum_density_truncated_pareto(t).unwrap().pdf(b + 1.0);
        let h = diff_density_truncated_pareto(t).unwrap().pdf(0.0);
        worst = worst
            .max((g - 2.0 / ((b + 1.0) * t)).abs())
            .max((h - (1.0 - 1.0 / b) / (t * t)).abs());
    }
    let h2 = diff_density_truncated_pareto(2.0).unwrap().pdf(0.0);
    ensure(worst <= 1e-10, format!("max deviation {worst:e}"))?;
    ensure((h2 - 0.216_166_2).abs() <= 5e-8, format!("h(0) at t=2 is {h2}"))?;
    Ok(format!("max deviation {worst:.1e}; h(0) = {h2:.7} at t = 2"))
}

fn c4_sum_bounds_and_divergence() -> Check {
    let start = Instant::now();
    let checker = Checker::new(1e-9);
    let names = ["theorem3_sum_entropy", "theorem3_sum_entropy_power", "theorem3_sum_ratio"];
    let mut margins = vec![Vec::new(); names.len()];
    for t in DEFAULT_T_GRID {
        let verdicts = checker.check_theorem3_bounds(t).map_err(|e| e.to_string())?;
        for (k, name) in names.iter().enumerate() {
            let v = verdicts.iter().find(|v| v.name == *name).ok_or("missing verdict")?;
            ensure(v.status == Status::Holds && v.margin > 0.0, format!("{name} at t={t}: {v:?}"))?;
            margins[k].push(v.margin);
        }
    }
    for (name, m) in names.iter().zip(&margins) {
        ensure(m.windows(2).all(|w| w[1] > w[0]), format!("{name} margins not increasing: {m:?}"))?;
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "ratio log-margin {:.3} at t=2 up to {:.3} at t=16 in {:?}",
        margins[2][0],
        margins[2][4],
        start.elapsed()
    ))
}

fn c5_lemma1() -> Check {
    let checker = Checker::new(1e-10);
    let mut worst_upper = 0.0f64;
    for beta in [2.0, 3.0, 5.0] {
        let (lower, upper) = checker.check_lemma1(&pareto(beta).unwrap(), beta, beta).map_err(|e| e.to_string())?;
        ensure(lower.holds() && upper.holds(), format!("beta={beta}: {lower:?} {upper:?}"))?;
        ensure(upper.margin.abs() <= 1e-6, format!("beta={beta}: upper margin {}", upper.margin))?;
        worst_upper = worst_upper.max(upper.margin.abs());
    }
    let mut all: Vec<PiecewiseDensity> = library().into_iter().map(|(_, d)| d).collect();
    all.extend([
        pareto(2.0).unwrap(),
        pareto(3.0).unwrap(),
        pareto(5.0).unwrap(),
        truncated_pareto(8.0).unwrap(),
        sum_density_truncated_pareto(2.0).unwrap(),
        diff_density_truncated_pareto(2.0).unwrap(),
    ]);
    let mut min_lower = f64::INFINITY;
    for d in &all {
        let v = checker.check_maxnorm_lower(d).map_err(|e| e.to_string())?;
        min_lower = min_lower.min(v.margin);
    }
    ensure(min_lower >= -1e-9, format!("lower-bound margin {min_lower}"))?;
    Ok(format!("upper margins <= {worst_upper:.1e}; smallest lower margin {min_lower:.3}"))
}

fn c6_epi_pairs() -> Check {
    let checker = Checker::new(1e-9);
    let lib = library();
    let mut count = 0;
    let mut gaussian_margin = f64::NAN;
    for i in 0..lib.len() {
        for j in i..lib.len() {
            let v = checker.check_epi(&lib[i].1, &lib[j].1).map_err(|e| e.to_string())?;
            ensure(v.holds(), format!("{} + {}: {v:?}", lib[i].0, lib[j].0))?;
            if i == 0 && j == 0 {
                gaussian_margin = v.margin;
            }
            count += 1;
        }
    }
    ensure(count == 10, format!("{count} pairs"))?;
    ensure(gaussian_margin.abs() <= 1e-8, format!("gaussian margin {gaussian_margin}"))?;
    Ok(format!("{count} pairs hold; equal-gaussian margin {gaussian_margin:.1e}"))
}

fn c7_corollary1() -> Check {
    let checker = Checker::new(1e-10);
    let lib = library();
    let oracle = [
        (0.5 * (4.0 * PI * E).ln(), 0.5 * (4.0 * PI * E).ln()),
        (0.5, 0.5),
        (1.0 + LN_2, 1.0 + 0.577_215_664_901_532_9),
    ];
    let mut gaussian_margin = f64::NAN;
    for ((name, d), (h_diff, h_sum)) in lib.iter().take(3).zip(oracle) {
        let (diff, sum) = checker.check_corollary1(d).map_err(|e| e.to_string())?;
        ensure(diff.holds() && sum.holds(), format!("{name}: {diff:?} {sum:?}"))?;
        ensure((diff.lhs - h_diff).abs() <= 1e-8, format!("{name}: h(X-Y) = {} vs {h_diff}", diff.lhs))?;
        ensure((sum.lhs - h_sum).abs() <= 1e-8, format!("{name}: h(X+Y) = {} vs {h_sum}", sum.lhs))?;
        if *name == "gaussian" {
            gaussian_margin = diff.margin;
        }
    }
    let expected = 1.0 - 0.5 * LN_2;
    ensure((gaussian_margin - expected).abs() <= 1e-9, format!("gaussian margin {gaussian_margin}"))?;
    Ok(format!("gaussian difference margin {gaussian_margin:.10} (1 - ln2/2)"))
}

fn c8_submodularity() -> Check {
    let checker = Checker::new(1e-9);
    let g = gaussian(0.0, 1.0).unwrap();
    let v = checker.check_submodularity(&g, &g, &g).map_err(|e| e.to_string())?;
    let expected = 0.5 * (4.0f64 / 3.0).ln();
    ensure((v.margin - expected).abs() <= 1e-9, format!("gaussian margin {}", v.margin))?;
    let tp = truncated_pareto(1.0).unwrap();
    let w = checker.check_submodularity(&tp, &tp, &tp).map_err(|e| e.to_string())?;
    ensure(w.holds(), format!("truncated pareto: {w:?}"))?;
    ensure(w.numeric_slack <= 1e-5, format!("slack {}", w.numeric_slack))?;
    let cfg = ConvolutionConfig::default();
    let pair_numeric = convolve_numeric(&tp, &tp, Sign::Plus, cfg).unwrap();
    let triple_numeric = convolve_numeric(&pair_numeric, &tp, Sign::Plus, cfg).unwrap();
    let triple = convolve(&sum_density_truncated_pareto(1.0).unwrap(), &tp, Sign::Plus, cfg).unwrap();
    let h_numeric = entropy_by_quadrature(&triple_numeric, 1e-8).map_err(|e| e.to_string())?;
    let h_mixed = entropy_by_quadrature(&triple, 1e-8).map_err(|e| e.to_string())?;
    let gap = (h_numeric.h - h_mixed.h).abs();
    ensure(gap <= 1e-5, format!("double numeric convolution entropy differs by {gap:e}"))?;
    Ok(format!(
        "gaussian margin {:.10}; truncated pareto(e) margin {:.4} with slack {:.1e}; double numeric convolution agrees to {gap:.1e}",
        v.margin, w.margin, w.numeric_slack
    ))
}

fn c9_d_form() -> Check {
    let checker = Checker::new(1e-9);
    let lib = library();
    for i in 0..lib.len() {
        for j in i..lib.len() {
            let v = checker.check_epi_d_form(&lib[i].1, &lib[j].1).map_err(|e| e.to_string())?;
            ensure(v.holds(), format!("{} + {}: {v:?}", lib[i].0, lib[j].0))?;
            if i == 0 && j == 0 {
                ensure(v.lhs.abs() <= 1e-12 && v.rhs.abs() <= 1e-12, format!("gaussian pair {v:?}"))?;
            }
        }
    }
    let rows = run_d_experiment(&[4.0, 8.0, 12.0, 16.0], 1e-9).map_err(|e| e.to_string())?;
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap_sum).collect();
    ensure(gaps.iter().all(|g| *g > 0.0), format!("gaps {gaps:?}"))?;
    ensure(gaps.windows(2).all(|w| w[1] > w[0]), format!("gaps not increasing: {gaps:?}"))?;
    Ok(format!("10 pairs hold; D(X_b) - D(X_b+Y_b) = {gaps:.4?}"))
}

fn c10_monte_carlo() -> Check {
    let families = [
        gaussian(0.0, 1.0).unwrap(),
        uniform(0.0, 1.0).unwrap(),
        exponential(1.0).unwrap(),
        pareto(3.0).unwrap(),
        truncated_pareto(2.0).unwrap(),
    ];
    let mut worst = 0.0f64;
    for d in &families {
        let mc = entropy_mc(d, 1_000_000, 2024).map_err(|e| e.to_string())?;
        let q = entropy_by_quadrature(d, 1e-10).map_err(|e| e.to_string())?;
        let gap = (mc.value - q.h).abs();
        ensure(
            gap <= 3.0 * mc.std_error + q.abs_error,
            format!("{:?}: |{} - {}| > 3 x {}", d.family(), mc.value, q.h, mc.std_error),
        )?;
        if mc.std_error > 0.0 {
            worst = worst.max(gap / mc.std_error);
        }
    }
    Ok(format!("largest deviation {worst:.2} standard errors (seed 2024, n = 1e6)"))
}

fn c11_determinism() -> Check {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let path = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_epilab"))
            .args(["divergence", "--t-grid", "2,4,8", "--tol", "1e-9", "--seed", "7", "--out"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.code() == Some(0), format!("exit status {status}"))?;
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    let (a, b) = (run("determinism_a.csv")?, run("determinism_b.csv")?);
    ensure(!a.is_empty() && a == b, "outputs differ")?;
    Ok(format!("two runs produced identical {} byte CSV files", a.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("closed-form entropy matches quadrature", c1_entropy_closed_form_vs_quadrature),
        ("sum/difference densities: normalization and numeric oracle", c2_convolution_correctness),
        ("closed-form point values g(b+1), h(0)", c3_point_values),
        ("lower bounds on h(X_b+Y_b) and divergence along the grid", c4_sum_bounds_and_divergence),
        ("maxnorm sandwich: Pareto tightness and general lower bound", c5_lemma1),
        ("EPI on all library pairs", c6_epi_pairs),
        ("log-concave sum/difference bounds", c7_corollary1),
        ("submodularity", c8_submodularity),
        ("EPI in D form and the growing D gap", c9_d_form),
        ("Monte Carlo oracle", c10_monte_carlo),
        ("byte-identical CLI output", c11_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
