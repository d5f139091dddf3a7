//! Path regularity from spectral decay, and its empirical counterpart.
//!
//! If `c_k² = O(k^{-q})` with `q = 1 + 2m + α`, `0 < α ≤ 1`, the covariogram's `2m`-th
//! derivative is Hölder-α (cosine series with nonnegative coefficients), the path has
//! `m` continuous derivatives, and the `m`-th derivative is Hölder-β for every
//! `β < α/2`.

use serde::Serialize;

use crate::coefficients::SpectralCoefficients;
use crate::error::{Error, Result};
use crate::grid::PathEnsemble;
use crate::stats::{ols, LagEstimate};
use crate::synthesis::lag_statistic;

/// Raw structure-function slopes above this are reported as saturated.
pub const SATURATION_SLOPE: f64 = 1.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub q: f64,
    pub constant: f64,
    /// RMS residual of the log-log regression.
    pub residual: f64,
    pub k_min: usize,
    pub k_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    /// `min(slope/2, 1)`.
    pub exponent: f64,
    pub std_error: f64,
    pub raw_slope: f64,
    /// Set when the raw slope exceeds [`SATURATION_SLOPE`]: the paths are possibly
    /// differentiable and the derivative spectrum should be analyzed instead.
    pub saturated: bool,
    pub structure: Vec<LagEstimate>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RegularityDiagnostics {
    /// Hölder order of the `2m`-th covariogram derivative.
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_fit: Option<DecayFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holder_estimate: Option<HolderEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub q: f64,
    pub m: u32,
    pub holder_bound: f64,
    pub diagnostics: RegularityDiagnostics,
}

/// Guaranteed regularity for `c_k² = O(k^{-q})`, `q > 1`.
///
/// `m` is the largest integer with `2m + 1 < q`, `α = min(1, q - 1 - 2m)` and the bound
/// is `α/2`. At odd integer `q` this steps `m` down so that `α` stays in `(0, 1]`.
pub fn predict_regularity(q: f64) -> Result<RegularityReport> {
    if !q.is_finite() {
        return Err(Error::InvalidArgument(format!("decay exponent must be finite, got {q}")));
    }
    if q <= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "q = {q}: not guaranteed continuous by this criterion (need q > 1)"
        )));
    }
    let m = ((q - 1.0) / 2.0).ceil() - 1.0;
    let alpha = (q - 1.0 - 2.0 * m).min(1.0);
    Ok(RegularityReport {
        q,
        m: m as u32,
        holder_bound: alpha / 2.0,
        diagnostics: RegularityDiagnostics { alpha, ..Default::default() },
    })
}

/// Least-squares fit of `log c_k² = log constant - q log k` over `k_min..=k_max`.
pub fn fit_decay(c: &SpectralCoefficients, k_min: usize, k_max: usize) -> Result<DecayFit> {
    if k_min < 1 || k_max < k_min {
        return Err(Error::InvalidArgument(format!("invalid fit window [{k_min}, {k_max}]")));
    }
    if c.tail().is_none() && k_max > c.explicit_len() {
        return Err(Error::InvalidArgument(format!(
            "fit window ends at {k_max} beyond the {} available coefficients",
            c.explicit_len()
        )));
    }
    if k_max - k_min + 1 < 4 {
        return Err(Error::InvalidArgument("fit window needs at least 4 coefficients".into()));
    }
    let mut x = Vec::with_capacity(k_max - k_min + 1);
    let mut y = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let ck = c.coefficient(k);
        if ck <= 0.0 {
            return Err(Error::Degenerate(format!("zero spectral mass in fit window (k = {k})")));
        }
        x.push((k as f64).ln());
        y.push(2.0 * ck.ln());
    }
    let fit = ols(&x, &y);
    Ok(DecayFit { q: -fit.slope, constant: fit.intercept.exp(), residual: fit.rms, k_min, k_max })
}

/// `S(d/n) = mean over t and replicates of (x_{t+d} - x_t)²`.
pub fn structure_function(e: &PathEnsemble, lags: &[usize]) -> Result<Vec<LagEstimate>> {
    if e.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = e.n();
    if let Some(&bad) = lags.iter().find(|&&d| d == 0 || 2 * d >= n) {
        return Err(Error::InvalidArgument(format!("lag {bad} must lie in [1, n/2)")));
    }
    lag_statistic(e, lags, |x, d| {
        (0..n).map(|j| (x[(j + d) % n] - x[j]).powi(2)).sum::<f64>() / n as f64
    })
}

/// Dyadic lags `h = 2^j/n` for `j` in `j_min..=j_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicWindow {
    pub j_min: u32,
    pub j_max: u32,
}

impl DyadicWindow {
    /// All dyadic lags in `[1/n, 1/8]`.
    pub fn full(n: usize) -> Self {
        Self { j_min: 0, j_max: (n.trailing_zeros()).saturating_sub(3) }
    }

    fn lags(&self, n: usize) -> Result<Vec<usize>> {
        let lags: Vec<usize> = (self.j_min..=self.j_max).map(|j| 1usize << j).collect();
        if lags.len() < 4 {
            return Err(Error::InvalidArgument("Hölder window needs at least 4 dyadic lags".into()));
        }
        if lags.iter().any(|&d| 8 * d > n) {
            return Err(Error::InvalidArgument(format!("Hölder window must stay within [1/n, 1/8] for n = {n}")));
        }
        Ok(lags)
    }
}

/// Half the log-log slope of the structure function over a dyadic lag window.
pub fn estimate_holder(e: &PathEnsemble, window: DyadicWindow) -> Result<HolderEstimate> {
    let lags = window.lags(e.n())?;
    let structure = structure_function(e, &lags)?;
    if let Some(bad) = structure.iter().find(|s| s.value <= 0.0) {
        return Err(Error::Degenerate(format!("structure function is {} at lag {}", bad.value, bad.lag)));
    }
    let x: Vec<f64> = structure.iter().map(|s| s.delta.ln()).collect();
    let y: Vec<f64> = structure.iter().map(|s| s.value.ln()).collect();
    let fit = ols(&x, &y);
    Ok(HolderEstimate {
        exponent: (fit.slope / 2.0).min(1.0),
        std_error: fit.slope_se / 2.0,
        raw_slope: fit.slope,
        saturated: fit.slope > SATURATION_SLOPE,
        structure,
    })
}
