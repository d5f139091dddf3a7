//! The covariogram ↔ coefficient isometry and coefficient estimation from paths.

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{clamp_tolerance, SpectralCoefficients};
use crate::covariogram::{Covariogram, SampledCovariogram};
use crate::dft::{analyze, analyze_values, synthesize_values, HarmonicDecomposition};
use crate::error::{Error, Result};
use crate::grid::PathEnsemble;
use crate::stats::jackknife_se;

/// Coefficients recovered from a covariogram, with any harmonics whose cosine
/// coefficient was numerically negative and clamped to zero.
#[derive(Debug, Clone)]
pub struct CoefficientExtraction {
    pub coefficients: SpectralCoefficients,
    /// `(k, a_k)` for each clamped harmonic.
    pub clamped: Vec<(usize, f64)>,
}

/// `c_k = √(∫ C̃(s) cos(2πks) ds)` for `k = 0..=K`, by quadrature on `n` grid points.
///
/// Cosine coefficients below `-max(1e-9·C̃(0), 1e-12)` mean the input is not a valid
/// covariance.
pub fn covariogram_to_coeffs(g: &Covariogram, k_max: usize, n: usize) -> Result<CoefficientExtraction> {
    let samples = g.sample(n)?;
    if 2 * k_max >= n {
        return Err(Error::Aliasing { harmonic: k_max, n });
    }
    let h = analyze_values(&samples)?;
    let tol = clamp_tolerance(samples[0].abs());
    let mut clamped = Vec::new();
    let mut roots = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let a = if k == 0 { h.mean() } else { 0.5 * h.cos(k) };
        if a < -tol {
            return Err(Error::NotPositiveSemidefinite { index: k, value: a });
        }
        if a < 0.0 {
            clamped.push((k, a));
        }
        roots.push(a.max(0.0).sqrt());
    }
    if let Some(&(k, a)) = clamped.iter().max_by(|x, y| x.1.abs().total_cmp(&y.1.abs())) {
        if a.abs() > 1e-3 * tol {
            log::warn!("clamped {} negative cosine coefficients (largest a_{k} = {a:e})", clamped.len());
        }
    }
    let c0 = roots.remove(0);
    Ok(CoefficientExtraction { coefficients: SpectralCoefficients::new(c0, roots, None)?, clamped })
}

/// `C̃(j/n) = c0² + 2Σ c_k² cos(2πkj/n)` over the explicit coefficients.
///
/// Any declared tail is not summed; truncate explicitly first.
pub fn coeffs_to_covariogram(c: &SpectralCoefficients, n: usize) -> Result<SampledCovariogram> {
    let top = c.support().unwrap_or(c.explicit_len());
    if 2 * top >= n {
        return Err(Error::Aliasing { harmonic: top, n });
    }
    let squares: Vec<f64> = c.harmonics()[..top].iter().map(|v| 2.0 * v * v).collect();
    let h = HarmonicDecomposition::from_parts(n, c.c0() * c.c0(), &[], &squares, 0.0)?;
    SampledCovariogram::new(synthesize_values(&h))
}

/// Coefficient estimates from an ensemble, with jackknife standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalCoefficients {
    /// `ĉ_k²` for `k = 0..=K`.
    pub squared: Vec<f64>,
    pub std_errors: Vec<f64>,
    #[serde(skip)]
    pub coefficients: SpectralCoefficients,
}

/// `ĉ0² = mean_r(x̄_r²)`, `ĉ_k² = mean_r((sin_k² + cos_k²)/4)`; unbiased for paths
/// produced by [`crate::synthesis::sample_path`].
pub fn empirical_coeffs(e: &PathEnsemble, k_max: usize) -> Result<EmpiricalCoefficients> {
    if e.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if 2 * k_max >= e.n() {
        return Err(Error::Aliasing { harmonic: k_max, n: e.n() });
    }
    let per_path: Vec<Vec<f64>> = e
        .paths()
        .par_iter()
        .map(|p| {
            let h = analyze(p)?;
            let mut row = Vec::with_capacity(k_max + 1);
            row.push(h.mean() * h.mean());
            row.extend((1..=k_max).map(|k| h.power(k) / 4.0));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let r = per_path.len() as f64;
    let mut squared = Vec::with_capacity(k_max + 1);
    let mut std_errors = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let column: Vec<f64> = per_path.iter().map(|row| row[k]).collect();
        squared.push(column.iter().sum::<f64>() / r);
        std_errors.push(jackknife_se(&column));
    }
    let roots: Vec<f64> = squared.iter().map(|v| v.sqrt()).collect();
    let coefficients = SpectralCoefficients::new(roots[0], roots[1..].to_vec(), None)?;
    Ok(EmpiricalCoefficients { squared, std_errors, coefficients })
}

/// Relative error `‖ĉ - c‖₂ / ‖c‖₂` of coefficients → covariogram → coefficients on `n` points.
pub fn coefficient_round_trip(c: &SpectralCoefficients, n: usize) -> Result<f64> {
    let k_max = c.explicit_len();
    let g = Covariogram::Sampled(coeffs_to_covariogram(c, n)?);
    let back = covariogram_to_coeffs(&g, k_max, n)?.coefficients;
    let mut num = (back.c0() - c.c0()).powi(2);
    let mut den = c.c0().powi(2);
    for k in 1..=k_max {
        num += (back.coefficient(k) - c.coefficient(k)).powi(2);
        den += c.coefficient(k).powi(2);
    }
    Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
}

/// Max-abs error of covariogram → coefficients (`K = n/2 - 1`) → covariogram, relative to `C̃(0)`.
pub fn covariogram_round_trip(g: &SampledCovariogram) -> Result<f64> {
    let n = g.n();
    let coeffs = covariogram_to_coeffs(&Covariogram::Sampled(g.clone()), n / 2 - 1, n)?.coefficients;
    let back = coeffs_to_covariogram(&coeffs, n)?;
    let err = g.values().iter().zip(back.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(err / g.variance().abs().max(f64::MIN_POSITIVE))
}
