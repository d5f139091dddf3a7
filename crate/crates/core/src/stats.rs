//! Small estimation helpers shared by the Monte Carlo estimators.

use serde::Serialize;

/// Sample mean and its standard error `sd/√R`. The standard error is zero for a single sample.
pub fn mean_se(samples: &[f64]) -> (f64, f64) {
    let r = samples.len();
    if r == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / r as f64;
    if r < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    (mean, (var / r as f64).sqrt())
}

/// Jackknife standard error of a mean, from the leave-one-out means. For the plain
/// mean this equals `sd/√R`.
pub fn jackknife_se(samples: &[f64]) -> f64 {
    let r = samples.len();
    if r < 2 {
        return 0.0;
    }
    let total: f64 = samples.iter().sum();
    let rf = r as f64;
    let loo: Vec<f64> = samples.iter().map(|v| (total - v) / (rf - 1.0)).collect();
    let loo_mean = loo.iter().sum::<f64>() / rf;
    let ss: f64 = loo.iter().map(|v| (v - loo_mean).powi(2)).sum();
    ((rf - 1.0) / rf * ss).sqrt()
}

/// Pearson correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

/// Unweighted least squares `y ≈ intercept + slope·x`.
pub fn ols(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_se = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    LinearFit { slope, intercept, slope_se, rms: (sse / n).sqrt() }
}

/// An estimate at one grid lag `d`, i.e. at `δ = d/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagEstimate {
    pub lag: usize,
    pub delta: f64,
    pub value: f64,
    pub std_error: f64,
}
