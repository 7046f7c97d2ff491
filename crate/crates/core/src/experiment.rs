//! Grid experiments over `t = ln b` for the truncated Pareto family, the
//! inequality suite behind `epilab verify`, and CSV/JSON serialization.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::json;

use crate::calculus::entropy_mc;
use crate::convolution::{diff_density_truncated_pareto, sum_density_truncated_pareto};
use crate::density::{exponential, gaussian, moments, pareto, truncated_pareto, uniform, PiecewiseDensity};
use crate::entropy::{entropy_closed_form_truncated_pareto, gaussian_entropy, EntropyReport};
use crate::error::{domain, Error, Result};
use crate::inequalities::{reflect, Checker, Hypothesis, InequalityVerdict, Status};

/// Default grid of `t = ln b` values.
pub const DEFAULT_T_GRID: [f64; 5] = [2.0, 4.0, 8.0, 12.0, 16.0];

/// Samples per Monte Carlo cross-check in the verify suite.
pub const MC_SAMPLES: usize = 1_000_000;

fn nan_from_null<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// One grid point. Entropies in nats, `logH_* = 2 h_*`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    #[serde(deserialize_with = "nan_from_null")]
    pub t: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub h_X: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub h_sum: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub h_diff: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub logH_X: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub logH_sum: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub logH_diff: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub log_ratio_sum: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub log_ratio_diff: f64,
    /// `t/3 - ln(2t)`, the log of `b^{1/3} / (2 ln b)`.
    #[serde(deserialize_with = "nan_from_null")]
    pub paper_lb_log_ratio: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub D_X: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub D_sum: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub D_diff: f64,
    pub all_bounds_hold: bool,
}

/// A row of the distance-to-normality experiment: the base row plus gaps and
/// normalized slopes.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DGapRow {
    #[serde(flatten)]
    pub row: ExperimentRow,
    #[serde(deserialize_with = "nan_from_null")]
    pub gap_sum: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub gap_diff: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub slope_X: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub slope_sum: f64,
}

impl From<ExperimentRow> for DGapRow {
    fn from(row: ExperimentRow) -> Self {
        Self {
            row,
            gap_sum: row.D_X - row.D_sum,
            gap_diff: row.D_X - row.D_diff,
            slope_X: row.D_X / row.t,
            slope_sum: row.D_sum / row.t,
        }
    }
}

/// A row together with the bound verdicts it summarizes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub row: ExperimentRow,
    pub verdicts: Vec<InequalityVerdict>,
    pub status: Status,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Usage("empty t grid".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !(t.is_finite() && **t >= 2.0)) {
        return Err(domain(format!("every t must be finite and >= 2, got {t}")));
    }
    Ok(())
}

/// Combined status: any violation wins, then any inconclusive verdict.
pub fn overall_status<'a>(statuses: impl IntoIterator<Item = &'a Status>) -> Status {
    let mut out = Status::Holds;
    for s in statuses {
        match s {
            Status::Violated => return Status::Violated,
            Status::Inconclusive => out = Status::Inconclusive,
            Status::Holds => {}
        }
    }
    out
}

fn evaluate_point(t: f64, checker: &Checker) -> GridPoint {
    match try_point(t, checker) {
        Ok(p) => p,
        Err(_) => {
            let h_x = entropy_closed_form_truncated_pareto(t).unwrap_or(f64::NAN);
            GridPoint {
                row: ExperimentRow {
                    t,
                    h_X: h_x,
                    h_sum: f64::NAN,
                    h_diff: f64::NAN,
                    logH_X: 2.0 * h_x,
                    logH_sum: f64::NAN,
                    logH_diff: f64::NAN,
                    log_ratio_sum: f64::NAN,
                    log_ratio_diff: f64::NAN,
                    paper_lb_log_ratio: t / 3.0 - (2.0 * t).ln(),
                    D_X: f64::NAN,
                    D_sum: f64::NAN,
                    D_diff: f64::NAN,
                    all_bounds_hold: false,
                },
                verdicts: Vec::new(),
                status: Status::Inconclusive,
            }
        }
    }
}

fn try_point(t: f64, checker: &Checker) -> Result<GridPoint> {
    let x = truncated_pareto(t)?;
    let sum = sum_density_truncated_pareto(t)?;
    let diff = diff_density_truncated_pareto(t)?;
    let h_x = entropy_closed_form_truncated_pareto(t)?;
    let hs = checker.quadrature_entropy(&sum)?;
    let hd = checker.quadrature_entropy(&diff)?;
    let verdicts = checker.theorem3_verdicts(t, hs, hd)?;
    let status = overall_status(verdicts.iter().map(|v| &v.status));

    let h = |r: Option<EntropyReport>| r.map_or(f64::NAN, |r| r.h);
    let (h_sum, h_diff) = (h(hs), h(hd));
    let d = |p: &PiecewiseDensity, h: f64| -> Result<f64> {
        Ok(gaussian_entropy(moments(p)?.variance) - h)
    };
    Ok(GridPoint {
        row: ExperimentRow {
            t,
            h_X: h_x,
            h_sum,
            h_diff,
            logH_X: 2.0 * h_x,
            logH_sum: 2.0 * h_sum,
            logH_diff: 2.0 * h_diff,
            log_ratio_sum: 2.0 * (h_sum - h_x),
            log_ratio_diff: 2.0 * (h_diff - h_x),
            paper_lb_log_ratio: t / 3.0 - (2.0 * t).ln(),
            D_X: d(&x, h_x)?,
            D_sum: d(&sum, h_sum)?,
            D_diff: d(&diff, h_diff)?,
            all_bounds_hold: status == Status::Holds,
        },
        verdicts,
        status,
    })
}

/// Evaluates every grid point (in parallel) and returns them ordered by `t`.
pub fn run_grid(t_grid: &[f64], tol: f64) -> Result<Vec<GridPoint>> {
    check_grid(t_grid)?;
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let checker = Checker::new(tol);
    let mut points: Vec<GridPoint> = t_grid.par_iter().map(|&t| evaluate_point(t, &checker)).collect();
    points.sort_by(|a, b| a.row.t.total_cmp(&b.row.t));
    Ok(points)
}

/// `H(X_b ± Y_b) / H(X_b)` across the grid, with the lower bounds checked at each `t`.
pub fn run_divergence_experiment(t_grid: &[f64], tol: f64) -> Result<Vec<ExperimentRow>> {
    Ok(run_grid(t_grid, tol)?.into_iter().map(|p| p.row).collect())
}

/// Distances to normality across the grid, with gaps and slopes.
pub fn run_d_experiment(t_grid: &[f64], tol: f64) -> Result<Vec<DGapRow>> {
    Ok(run_grid(t_grid, tol)?
        .into_iter()
        .map(|p| DGapRow::from(p.row))
        .collect())
}

/// Sanity row for `X ~ N(0,1)`: every `D` is computed by quadrature and should vanish.
/// `t` and the reference lower bound are `NaN` since no `b` is involved.
pub fn gaussian_control(tol: f64) -> Result<DGapRow> {
    let checker = Checker::new(tol);
    let x = gaussian(0.0, 1.0)?;
    let s = gaussian(0.0, 2.0)?;
    let h = |d: &PiecewiseDensity| -> Result<f64> {
        checker
            .quadrature_entropy(d)?
            .map(|r| r.h)
            .ok_or_else(|| Error::Inconclusive("gaussian entropy quadrature".into()))
    };
    let (h_x, h_s) = (h(&x)?, h(&s)?);
    let (d_x, d_s) = (gaussian_entropy(1.0) - h_x, gaussian_entropy(2.0) - h_s);
    let slack = 4.0 * tol;
    let row = ExperimentRow {
        t: f64::NAN,
        h_X: h_x,
        h_sum: h_s,
        h_diff: h_s,
        logH_X: 2.0 * h_x,
        logH_sum: 2.0 * h_s,
        logH_diff: 2.0 * h_s,
        log_ratio_sum: 2.0 * (h_s - h_x),
        log_ratio_diff: 2.0 * (h_s - h_x),
        paper_lb_log_ratio: f64::NAN,
        D_X: d_x,
        D_sum: d_s,
        D_diff: d_s,
        all_bounds_hold: d_x.abs() <= slack && d_s.abs() <= slack,
    };
    Ok(DGapRow {
        row,
        gap_sum: d_x - d_s,
        gap_diff: d_x - d_s,
        slope_X: f64::NAN,
        slope_sum: f64::NAN,
    })
}

/// A verdict with the status the suite expects from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteEntry {
    #[serde(flatten)]
    pub verdict: InequalityVerdict,
    pub expected: Status,
}

impl SuiteEntry {
    fn expect(verdict: InequalityVerdict, expected: Status) -> Self {
        Self { verdict, expected }
    }

    pub fn as_expected(&self) -> bool {
        self.verdict.status == self.expected
    }
}

/// Densities used across the verify suite, with labels.
pub fn library() -> Result<Vec<(&'static str, PiecewiseDensity)>> {
    Ok(vec![
        ("gaussian", gaussian(0.0, 1.0)?),
        ("uniform", uniform(0.0, 1.0)?),
        ("exponential", exponential(1.0)?),
        ("truncated_pareto", truncated_pareto(2.0)?),
    ])
}

/// Cross-check of quadrature against Monte Carlo: `|h_mc - h_quad| <= 3 se`.
fn monte_carlo_check(checker: &Checker, d: &PiecewiseDensity, seed: u64) -> Result<InequalityVerdict> {
    let est = entropy_mc(d, MC_SAMPLES, seed)?;
    let q = checker
        .quadrature_entropy(d)?
        .ok_or_else(|| Error::Inconclusive("quadrature entropy".into()))?;
    let lhs = (est.value - q.h).abs();
    let rhs = 3.0 * est.std_error;
    let margin = rhs - lhs;
    let slack = 4.0 * q.abs_error;
    let mut inputs = std::collections::BTreeMap::new();
    inputs.insert("X".into(), serde_json::to_value(d.family()).unwrap_or_default());
    inputs.insert("n".into(), json!(MC_SAMPLES));
    inputs.insert("seed".into(), json!(seed));
    inputs.insert("h_mc".into(), json!(est.value));
    inputs.insert("h_quadrature".into(), json!(q.h));
    Ok(InequalityVerdict {
        name: "monte_carlo_consistency".into(),
        lhs,
        rhs,
        margin,
        numeric_slack: slack,
        status: crate::inequalities::classify_margin(margin, slack, checker.report_tol),
        inputs,
        tolerances: checker.tolerances(),
        units: Default::default(),
    })
}

/// The full inequality suite. Every entry records the status it should have;
/// the only expected violations are Theorem 2 at `b = e^40`, where its
/// hypothesis fails.
pub fn verify_suite(tol: f64, seed: u64) -> Result<Vec<SuiteEntry>> {
    let checker = Checker::new(tol);
    let lib = library()?;
    let holds = |v: InequalityVerdict| SuiteEntry::expect(v, Status::Holds);
    let mut out = Vec::new();

    for i in 0..lib.len() {
        for j in i..lib.len() {
            out.push(holds(checker.check_epi(&lib[i].1, &lib[j].1)?));
            out.push(holds(checker.check_epi_d_form(&lib[i].1, &lib[j].1)?));
        }
    }

    for beta in [2.0, 3.0, 5.0] {
        let (lower, upper) = checker.check_lemma1(&pareto(beta)?, beta, beta)?;
        out.push(holds(lower));
        out.push(holds(upper));
    }
    let mut maxnorm = lib.iter().map(|(_, d)| d.clone()).collect::<Vec<_>>();
    maxnorm.extend([pareto(2.0)?, pareto(3.5)?, truncated_pareto(8.0)?]);
    maxnorm.push(sum_density_truncated_pareto(2.0)?);
    maxnorm.push(diff_density_truncated_pareto(2.0)?);
    for d in &maxnorm {
        out.push(holds(checker.check_maxnorm_lower(d)?));
    }

    for (_, d) in lib.iter().take(3) {
        let (diff, sum) = checker.check_corollary1(d)?;
        out.push(holds(diff));
        out.push(holds(sum));
    }

    let g = gaussian(0.0, 1.0)?;
    let u = uniform(0.0, 1.0)?;
    let tp = truncated_pareto(1.0)?;
    out.push(holds(checker.check_submodularity(&g, &g, &g)?));
    out.push(holds(checker.check_submodularity(&u, &u, &u)?));
    out.push(holds(checker.check_submodularity(&tp, &tp, &tp)?));
    out.push(holds(checker.check_submodularity(&tp, &tp, &reflect(&tp)?)?));
    out.push(holds(checker.check_sum_difference(&tp)?));

    for d in [&g, &exponential(1.0)?] {
        let (diff, sum) = checker.check_theorem2(d, 2.0, Hypothesis::Asserted)?;
        out.push(holds(diff));
        out.push(holds(sum));
    }
    let (diff, sum) = checker.check_theorem2(&truncated_pareto(40.0)?, 2.0, Hypothesis::NotAsserted)?;
    for mut v in [diff, sum] {
        v.inputs.insert("expected".into(), json!("violated"));
        out.push(SuiteEntry::expect(v, Status::Violated));
    }

    for t in DEFAULT_T_GRID {
        out.extend(checker.check_theorem3_bounds(t)?.into_iter().map(holds));
    }

    let mc = [
        gaussian(0.0, 1.0)?,
        uniform(0.0, 1.0)?,
        exponential(1.0)?,
        truncated_pareto(2.0)?,
        pareto(3.0)?,
    ];
    for (i, d) in mc.iter().enumerate() {
        out.push(holds(monte_carlo_check(&checker, d, seed.wrapping_add(i as u64))?));
    }
    Ok(out)
}

/// Output format for [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Rows that can be written as CSV.
pub trait Tabular: Serialize {
    fn header() -> Vec<&'static str>;
    fn cells(&self) -> Vec<String>;
}

const ROW_HEADER: [&str; 14] = [
    "t",
    "h_X",
    "h_sum",
    "h_diff",
    "logH_X",
    "logH_sum",
    "logH_diff",
    "log_ratio_sum",
    "log_ratio_diff",
    "paper_lb_log_ratio",
    "D_X",
    "D_sum",
    "D_diff",
    "all_bounds_hold",
];

impl Tabular for ExperimentRow {
    fn header() -> Vec<&'static str> {
        ROW_HEADER.to_vec()
    }

    fn cells(&self) -> Vec<String> {
        let mut c: Vec<String> = [
            self.t,
            self.h_X,
            self.h_sum,
            self.h_diff,
            self.logH_X,
            self.logH_sum,
            self.logH_diff,
            self.log_ratio_sum,
            self.log_ratio_diff,
            self.paper_lb_log_ratio,
            self.D_X,
            self.D_sum,
            self.D_diff,
        ]
        .iter()
        .map(|&x| format_g12(x))
        .collect();
        c.push(self.all_bounds_hold.to_string());
        c
    }
}

impl Tabular for DGapRow {
    fn header() -> Vec<&'static str> {
        let mut h = ROW_HEADER.to_vec();
        h.extend(["gap_sum", "gap_diff", "slope_X", "slope_sum"]);
        h
    }

    fn cells(&self) -> Vec<String> {
        let mut c = self.row.cells();
        c.extend([self.gap_sum, self.gap_diff, self.slope_X, self.slope_sum].map(format_g12));
        c
    }
}

/// Twelve significant digits in the style of C's `%.12g`.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Serializes rows to a string in the requested format.
pub fn render<R: Tabular>(rows: &[R], format: Format) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Usage("no rows to emit".into()));
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(R::header()).map_err(io)?;
            for r in rows {
                w.write_record(r.cells()).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes rows to `path`, or to stdout when `path` is `None`.
pub fn emit<R: Tabular>(rows: &[R], format: Format, path: Option<&Path>) -> Result<()> {
    let text = render(rows, format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses CSV produced by [`render`].
pub fn parse_csv<R: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<R>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Io(e.to_string())))
        .collect()
}

/// Parses JSON produced by [`render`]; `null` reads back as `NaN`.
pub fn parse_json<R: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<R>> {
    serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
}

/// Measured `D/t` at the largest grid point, for comparison with the
/// asymptotic slopes `D(X_b) ~ t/2` (from `Var X_b ~ b²/(2t)`) and the
/// stated `3/2`.
pub fn slope_summary(rows: &[DGapRow]) -> Option<String> {
    let last = rows.iter().rev().find(|r| r.row.t.is_finite())?;
    Some(format!(
        "D_X/t = {} and D_sum/t = {} at t = {}; D_X/t tends to 1/2 as t grows (stated value 3/2)",
        format_g12(last.slope_X),
        format_g12(last.slope_sum),
        format_g12(last.row.t)
    ))
}
