//! Sample paths as truncated random trigonometric series.

use std::f64::consts::{PI, SQRT_2};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::coefficients::SpectralCoefficients;
use crate::dft::{synthesize_values, HarmonicDecomposition};
use crate::error::{Error, Result};
use crate::grid::{check_grid, GridPath, PathEnsemble, StreamSeed};
use crate::stats::{mean_se, LagEstimate};

pub const DEFAULT_EPS: f64 = 1e-4;

/// Below this many harmonics paths are summed directly instead of through the inverse FFT.
const DIRECT_SUM_LIMIT: usize = 32;

const MAX_TRUNCATION: u64 = 1 << 52;

/// Smallest `K` whose omitted energy `2Σ_{k>K} c_k²` is at most `eps` times the total
/// mass `c0² + 2Σ c_k²`, with the declared tail accounting for harmonics past the
/// explicit ones.
pub fn truncation_index(c: &SpectralCoefficients, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    let total = c.total_mass();
    if total == 0.0 {
        return Ok(0);
    }
    let budget = eps * total;
    let explicit = c.harmonics();
    let analytic = c.tail().map_or(0.0, |t| 2.0 * t.mass_from(explicit.len() + 1));

    // suffix[k] = 2 Σ_{i>k} c_i² over the explicit entries
    let mut suffix = vec![0.0; explicit.len() + 1];
    for k in (0..explicit.len()).rev() {
        suffix[k] = suffix[k + 1] + 2.0 * explicit[k] * explicit[k];
    }
    if let Some(k) = (0..=explicit.len()).find(|&k| suffix[k] + analytic <= budget) {
        return Ok(k);
    }

    let tail = c.tail().ok_or_else(|| Error::TailUnknown("no declared tail".into()))?;
    let omitted = |k: u64| 2.0 * tail.constant * crate::special::zeta_tail(tail.q, k + 1);
    let mut lo = explicit.len() as u64;
    let mut hi = lo.max(1);
    while omitted(hi) > budget {
        lo = hi;
        hi *= 2;
        if hi > MAX_TRUNCATION {
            return Err(Error::InvalidArgument(format!(
                "eps = {eps} needs more than 2^52 harmonics for tail exponent {}",
                tail.q
            )));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if omitted(mid) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi as usize)
}

fn check_band(k_max: usize, n: usize) -> Result<()> {
    check_grid(n, 4)?;
    if 2 * k_max >= n {
        return Err(Error::Aliasing { harmonic: k_max, n });
    }
    Ok(())
}

fn sample_with(coefs: &[f64], n: usize, seed: StreamSeed) -> GridPath {
    let mut rng = seed.rng();
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mean = coefs[0] * normal();
    let k_max = coefs.len() - 1;
    let mut sin = Vec::with_capacity(k_max);
    let mut cos = Vec::with_capacity(k_max);
    for &ck in &coefs[1..] {
        let y = normal();
        let y_prime = normal();
        sin.push(SQRT_2 * ck * y);
        cos.push(SQRT_2 * ck * y_prime);
    }

    let values = if k_max < DIRECT_SUM_LIMIT {
        let w = 2.0 * PI / n as f64;
        (0..n)
            .map(|j| {
                let mut x = mean;
                for k in 1..=k_max {
                    let theta = w * ((k * j) % n) as f64;
                    x += sin[k - 1] * theta.sin() + cos[k - 1] * theta.cos();
                }
                x
            })
            .collect()
    } else {
        let h = HarmonicDecomposition::from_parts(n, mean, &sin, &cos, 0.0)
            .expect("band checked by caller");
        synthesize_values(&h)
    };
    GridPath::from_raw(values, Some(seed))
}

/// One path of `x_j = c0·Y'0 + √2 Σ_{k≤K} c_k (Y_k sin(2πkj/n) + Y'_k cos(2πkj/n))`.
///
/// Draws are taken in the order `Y'0, Y_1, Y'_1, Y_2, Y'_2, …`, so paths from the same
/// stream share their low-frequency draws whatever `K` and the coefficients are.
pub fn sample_path(c: &SpectralCoefficients, k_max: usize, n: usize, seed: StreamSeed) -> Result<GridPath> {
    check_band(k_max, n)?;
    let coefs: Vec<f64> = (0..=k_max).map(|k| c.coefficient(k)).collect();
    Ok(sample_with(&coefs, n, seed))
}

/// `R` independent paths; replicate `r` uses stream `r` of `master_seed`, so it does not
/// depend on how many replicates are requested.
pub fn sample_ensemble(
    c: &SpectralCoefficients,
    k_max: usize,
    n: usize,
    replicates: usize,
    master_seed: u64,
) -> Result<PathEnsemble> {
    check_band(k_max, n)?;
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicate count must be at least 1".into()));
    }
    let coefs: Vec<f64> = (0..=k_max).map(|k| c.coefficient(k)).collect();
    let paths = (0..replicates as u64)
        .into_par_iter()
        .map(|r| sample_with(&coefs, n, StreamSeed::new(master_seed, r)))
        .collect();
    PathEnsemble::new(paths, Some(master_seed))
}

/// Circular-average covariogram estimate `Ĉ(d/n)` over all replicates, with the
/// between-replicate standard error.
pub fn empirical_covariogram(e: &PathEnsemble, lags: &[usize]) -> Result<Vec<LagEstimate>> {
    if e.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = e.n();
    if let Some(&bad) = lags.iter().find(|&&d| d >= n) {
        return Err(Error::InvalidArgument(format!("lag {bad} is not below the grid size {n}")));
    }
    lag_statistic(e, lags, |x, d| {
        (0..n).map(|j| x[j] * x[(j + d) % n]).sum::<f64>() / n as f64
    })
}

/// Per-replicate statistic per lag, averaged with standard errors.
pub(crate) fn lag_statistic(
    e: &PathEnsemble,
    lags: &[usize],
    stat: impl Fn(&[f64], usize) -> f64 + Sync,
) -> Result<Vec<LagEstimate>> {
    let per_path: Vec<Vec<f64>> = e
        .paths()
        .par_iter()
        .map(|p| lags.iter().map(|&d| stat(p.values(), d)).collect())
        .collect();
    let n = e.n() as f64;
    Ok(lags
        .iter()
        .enumerate()
        .map(|(i, &lag)| {
            let column: Vec<f64> = per_path.iter().map(|v| v[i]).collect();
            let (value, std_error) = mean_se(&column);
            LagEstimate { lag, delta: lag as f64 / n, value, std_error }
        })
        .collect())
}
