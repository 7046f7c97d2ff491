//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! Only interior nodes are ever evaluated, so integrands with integrable
//! endpoint singularities (log-type, or removable 0/0 forms) need no special
//! handling. Wide intervals are integrated after the substitution `x = e^u`,
//! half-infinite ones after `x = a/s`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Endpoint ratio above which `x = e^u` is applied.
pub const LOG_SUBSTITUTION_RATIO: f64 = 1e4;

const DEFAULT_MAX_SUBDIVISIONS: usize = 20_000;

// Kronrod abscissae on [0, 1); odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_106,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

/// Adaptive integrator configuration.
///
/// Convergence is declared once the summed error estimate drops below
/// `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self::new(1e-10)
    }
}

/// Change of variables applied to one initial segment.
#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// `x = sign * e^u`
    Exp { sign: f64 },
    /// `x = anchor / s`, `s` in (0, 1)
    Reciprocal { anchor: f64 },
}

impl Map {
    #[inline]
    fn point(self, u: f64) -> (f64, f64) {
        match self {
            Map::Identity => (u, 1.0),
            Map::Exp { sign } => {
                let e = u.exp();
                (sign * e, e)
            }
            Map::Reciprocal { anchor } => (anchor / u, anchor.abs() / (u * u)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    map: Map,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    /// Round-off level `50 ε ∫|f|` below which `error` cannot shrink.
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

impl Integrator {
    pub fn new(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    /// Pure relative tolerance (absolute floor at the smallest normal float).
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            abs_tol: f64::MIN_POSITIVE,
            rel_tol,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// Integrates `f` over `(a, b)`. Either limit may be infinite.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> f64,
    {
        if a.is_nan() || b.is_nan() {
            return Err(domain("integration limit is NaN"));
        }
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) {
            return Err(domain("integration tolerance must be positive"));
        }
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                subdivisions: 0,
                converged: true,
            });
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut pieces = Vec::new();
        decompose(lo, hi, &mut pieces);
        let mut r = self.adapt(&f, &pieces)?;
        r.value *= sign;
        Ok(r)
    }

    fn adapt<F>(&self, f: &F, pieces: &[(Map, f64, f64)]) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> f64,
    {
        let mut heap = BinaryHeap::with_capacity(64);
        let mut frozen: Vec<Segment> = Vec::new();
        let mut value = 0.0;
        let mut error = 0.0;
        let mut floor = 0.0;
        for &(map, lo, hi) in pieces {
            let s = kronrod(f, map, lo, hi)?;
            value += s.value;
            error += s.error;
            floor += s.floor;
            heap.push(s);
        }

        let mut subdivisions = 0;
        loop {
            if error <= self.target(value).max(floor) {
                // The running totals lose accuracy through cancellation;
                // confirm against an exact re-sum before stopping.
                (value, error, floor) = totals(&heap, &frozen);
                if error <= self.target(value).max(floor * (1.0 + 1e-9)) {
                    break;
                }
            }
            if subdivisions >= self.max_subdivisions {
                break;
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.lo + worst.hi);
            if mid <= worst.lo || mid >= worst.hi {
                frozen.push(worst);
                continue;
            }
            let left = kronrod(f, worst.map, worst.lo, mid)?;
            let right = kronrod(f, worst.map, mid, worst.hi)?;
            subdivisions += 1;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            floor += left.floor + right.floor - worst.floor;
            heap.push(left);
            heap.push(right);
        }

        let (value, error, floor) = totals(&heap, &frozen);
        Ok(QuadratureResult {
            value,
            abs_error_estimate: error,
            subdivisions,
            converged: error <= self.target(value).max(floor * (1.0 + 1e-9)),
        })
    }
}

fn totals(heap: &BinaryHeap<Segment>, frozen: &[Segment]) -> (f64, f64, f64) {
    heap.iter()
        .chain(frozen.iter())
        .fold((0.0, 0.0, 0.0), |(v, e, r), s| (v + s.value, e + s.error, r + s.floor))
}

/// Integrates `f` over `(a, b)` to absolute tolerance `tol`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    Integrator::new(tol).integrate(f, a, b)
}

fn decompose(a: f64, b: f64, out: &mut Vec<(Map, f64, f64)>) {
    debug_assert!(a < b);
    if a == f64::NEG_INFINITY && b == f64::INFINITY {
        decompose(a, 0.0, out);
        decompose(0.0, b, out);
    } else if b == f64::INFINITY {
        if a >= 1.0 {
            out.push((Map::Reciprocal { anchor: a }, 0.0, 1.0));
        } else {
            decompose(a, 1.0, out);
            out.push((Map::Reciprocal { anchor: 1.0 }, 0.0, 1.0));
        }
    } else if a == f64::NEG_INFINITY {
        if b <= -1.0 {
            out.push((Map::Reciprocal { anchor: b }, 0.0, 1.0));
        } else {
            out.push((Map::Reciprocal { anchor: -1.0 }, 0.0, 1.0));
            decompose(-1.0, b, out);
        }
    } else if a >= 0.0 {
        positive(a, b, 1.0, out);
    } else if b <= 0.0 {
        positive(-b, -a, -1.0, out);
    } else if (-a).max(b) > LOG_SUBSTITUTION_RATIO {
        decompose(a, 0.0, out);
        decompose(0.0, b, out);
    } else {
        out.push((Map::Identity, a, b));
    }
}

/// `0 <= lo < hi`; `sign = -1` mirrors the segment onto the negative axis.
fn positive(lo: f64, hi: f64, sign: f64, out: &mut Vec<(Map, f64, f64)>) {
    let exp = Map::Exp { sign };
    if lo > 0.0 && hi > LOG_SUBSTITUTION_RATIO * lo {
        out.push((exp, lo.ln(), hi.ln()));
    } else if lo == 0.0 && hi > LOG_SUBSTITUTION_RATIO {
        push_linear(0.0, 1.0, sign, out);
        out.push((exp, 0.0, hi.ln()));
    } else {
        push_linear(lo, hi, sign, out);
    }
}

fn push_linear(lo: f64, hi: f64, sign: f64, out: &mut Vec<(Map, f64, f64)>) {
    if sign > 0.0 {
        out.push((Map::Identity, lo, hi));
    } else {
        out.push((Map::Identity, -hi, -lo));
    }
}

#[inline]
fn eval<F: Fn(f64) -> f64>(f: &F, map: Map, u: f64) -> Result<f64> {
    let (x, jac) = map.point(u);
    let y = f(x);
    if !y.is_finite() {
        return Err(Error::NonFiniteIntegrand { x, value: y });
    }
    Ok(y * jac)
}

/// One G10/K21 pass with the QUADPACK error heuristic.
fn kronrod<F: Fn(f64) -> f64>(f: &F, map: Map, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = eval(f, map, center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(f, map, center - dx)?;
        let f2 = eval(f, map, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Ok(Segment {
        map,
        lo,
        hi,
        value,
        error,
        floor,
    })
}
