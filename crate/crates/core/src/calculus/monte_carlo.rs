use std::ops::Range;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::{inverse_cdf, PiecewiseDensity};
use crate::error::{Error, Result};

/// Sample-mean estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    /// Sample standard deviation divided by `sqrt(n_samples)`.
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// `x ↦ -p(x) ln p(x)`, with `0 ln 0 = 0`.
pub fn entropy_integrand(d: &PiecewiseDensity) -> impl Fn(f64) -> f64 + '_ {
    move |x| {
        let p = d.pdf(x);
        if p > 0.0 {
            -p * p.ln()
        } else {
            0.0
        }
    }
}

/// Uniform on the open interval (0, 1), 53 bits.
#[inline]
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Draws for indices `range` of the stream identified by `seed`.
///
/// Draw `i` depends only on `(seed, i)`, so disjoint ranges can be produced
/// independently and concatenated.
pub fn sample_range(d: &PiecewiseDensity, seed: u64, range: Range<usize>) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // One u64 draw consumes two 32-bit words of the keystream.
    rng.set_word_pos(2 * range.start as u128);
    range
        .map(|_| inverse_cdf(d, open_unit(&mut rng)))
        .collect()
}

/// `n` inverse-CDF draws from `d`, deterministic in `seed`.
pub fn sample(d: &PiecewiseDensity, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_range(d, seed, 0..n)
}

/// Monte Carlo estimate of `h = E[-ln p(X)]` using the known density.
pub fn entropy_mc(d: &PiecewiseDensity, n: usize, seed: u64) -> Result<MCEstimate> {
    if n == 0 {
        return Err(Error::Domain("entropy_mc needs at least one sample".into()));
    }
    let xs = sample(d, n, seed)?;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let p = d.pdf(x);
        if p <= 0.0 {
            return Err(Error::ZeroDensity(x));
        }
        let v = -p.ln();
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    Ok(MCEstimate {
        value: mean,
        std_error: (var / n as f64).sqrt(),
        n_samples: n,
        seed,
    })
}
