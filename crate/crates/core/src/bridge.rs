//! Brownian-bridge constructions on the circle.
//!
//! * plain: `x_t = √2 Σ W_k sin(kπt)/(kπ)`, pinned at `x_0 = x_1 = 0`;
//! * centered (shift): the plain bridge read from a uniformly random starting point,
//!   stationary with covariogram `(|δ| - 1/2)²/2 + 1/24`;
//! * centered (series): the same law as a trigonometric series with `c0² = 1/12`,
//!   `c_k = 1/(2πk)`;
//! * centralized: the plain bridge minus its time average, covariogram
//!   `(|δ| - 1/2)²/2 - 1/24`.
//!
//! The centered bridge splits as the centralized bridge plus an independent offset of
//! variance 1/12.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{DecayTail, SpectralCoefficients};
use crate::covariogram::ClosedForm;
use crate::dft::{synthesize_values, HarmonicDecomposition};
use crate::error::{Error, Result};
use crate::grid::{check_grid, GridPath, PathEnsemble, StreamSeed};
use crate::stats::{correlation, mean_se};
use crate::synthesis::{empirical_covariogram, sample_ensemble};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BridgeVariant {
    Plain,
    CenteredShift,
    CenteredSeries,
    Centralized,
}

impl BridgeVariant {
    pub fn name(&self) -> &'static str {
        match self {
            BridgeVariant::Plain => "plain",
            BridgeVariant::CenteredShift => "centered-shift",
            BridgeVariant::CenteredSeries => "centered-series",
            BridgeVariant::Centralized => "centralized",
        }
    }
}

impl fmt::Display for BridgeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BridgeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(BridgeVariant::Plain),
            "centered-shift" => Ok(BridgeVariant::CenteredShift),
            "centered-series" => Ok(BridgeVariant::CenteredSeries),
            "centralized" => Ok(BridgeVariant::Centralized),
            other => Err(Error::InvalidArgument(format!(
                "unknown bridge variant '{other}' (plain | centered-shift | centered-series | centralized)"
            ))),
        }
    }
}

/// Default sine-series truncation `M = n/2`.
pub fn default_truncation(n: usize) -> usize {
    n / 2
}

fn check_sine_truncation(n: usize, m: usize) -> Result<()> {
    check_grid(n, 2)?;
    if m >= n {
        return Err(Error::InvalidArgument(format!("sine truncation {m} must be below the grid size {n}")));
    }
    Ok(())
}

/// `√2 Σ_{k≤M} W_k sin(πkj/n)/(kπ)` evaluated as the first half of a `2n`-point series.
fn plain_values<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<f64> {
    let amplitudes: Vec<f64> = (1..=m)
        .map(|k| {
            let w: f64 = StandardNormal.sample(rng);
            SQRT_2 * w / (k as f64 * PI)
        })
        .collect();
    let mut values = if m == 0 {
        vec![0.0; 2 * n]
    } else {
        let h = HarmonicDecomposition::from_parts((2 * n).max(4), 0.0, &amplitudes, &[], 0.0)
            .expect("m < n keeps every half-frequency below Nyquist of the doubled grid");
        synthesize_values(&h)
    };
    values.truncate(n);
    values[0] = 0.0;
    values
}

/// A Brownian bridge on the grid, `x_0 = 0`.
pub fn plain_bridge_path(n: usize, m: usize, seed: StreamSeed) -> Result<GridPath> {
    check_sine_truncation(n, m)?;
    Ok(GridPath::from_raw(plain_values(n, m, &mut seed.rng()), Some(seed)))
}

/// The underlying plain bridge and the grid offset `U·n` drawn after it.
pub fn centered_bridge_parts(n: usize, m: usize, seed: StreamSeed) -> Result<(GridPath, usize)> {
    check_sine_truncation(n, m)?;
    let mut rng = seed.rng();
    let plain = GridPath::from_raw(plain_values(n, m, &mut rng), Some(seed));
    let u = rng.random_range(0..n);
    Ok((plain, u))
}

/// The plain bridge rotated by a starting point drawn uniformly from the grid.
pub fn centered_bridge_shift(n: usize, m: usize, seed: StreamSeed) -> Result<GridPath> {
    let (plain, u) = centered_bridge_parts(n, m, seed)?;
    Ok(plain.shifted(u))
}

/// `c0 = 1/√12`, `c_k = 1/(2πk)` for all `k ≥ 1` (carried by the declared tail).
pub fn centered_bridge_coefficients() -> SpectralCoefficients {
    SpectralCoefficients::new(1.0 / 12f64.sqrt(), Vec::new(), None)
        .expect("constant coefficients are valid")
        .with_tail(DecayTail { q: 2.0, constant: 1.0 / (4.0 * PI * PI) })
}

/// The plain bridge minus its grid mean.
pub fn centralized_bridge_path(n: usize, m: usize, seed: StreamSeed) -> Result<GridPath> {
    let plain = plain_bridge_path(n, m, seed)?;
    let mean = plain.mean();
    Ok(plain.map(|v| v - mean))
}

/// `R` replicates of a bridge variant, replicate `r` on stream `r` of `master_seed`.
///
/// `m` is the sine truncation for the path constructions and the harmonic cutoff
/// (clipped to `n/2 - 1`) for the series construction.
pub fn bridge_ensemble(
    variant: BridgeVariant,
    n: usize,
    m: usize,
    replicates: usize,
    master_seed: u64,
) -> Result<PathEnsemble> {
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicate count must be at least 1".into()));
    }
    if variant == BridgeVariant::CenteredSeries {
        check_grid(n, 4)?;
        let k_max = m.min(n / 2 - 1);
        return sample_ensemble(&centered_bridge_coefficients(), k_max, n, replicates, master_seed);
    }
    check_sine_truncation(n, m)?;
    let paths = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let seed = StreamSeed::new(master_seed, r);
            match variant {
                BridgeVariant::Plain => plain_bridge_path(n, m, seed),
                BridgeVariant::CenteredShift => centered_bridge_shift(n, m, seed),
                BridgeVariant::Centralized => centralized_bridge_path(n, m, seed),
                BridgeVariant::CenteredSeries => unreachable!(),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PathEnsemble::new(paths, Some(master_seed))
}

/// One statistical comparison against a target value.
#[derive(Debug, Clone, Serialize)]
pub struct BandCheck {
    pub label: String,
    pub estimate: f64,
    pub target: f64,
    pub std_error: f64,
    pub pass: bool,
}

impl BandCheck {
    /// Passes when `|estimate - target| ≤ 3·std_error`.
    pub fn three_sigma(label: impl Into<String>, estimate: f64, target: f64, std_error: f64) -> Self {
        let pass = (estimate - target).abs() <= 3.0 * std_error;
        Self { label: label.into(), estimate, target, std_error, pass }
    }

    pub fn z_score(&self) -> f64 {
        (self.estimate - self.target) / self.std_error
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub replicates: usize,
    pub n: usize,
    pub sine_terms: usize,
    /// `Var(Z)` of the grid mean against 1/12.
    pub offset_variance: BandCheck,
    /// Covariogram of the mean-removed paths against `(|δ| - 1/2)²/2 - 1/24`.
    pub residual_covariogram: Vec<BandCheck>,
    /// Correlation of the offset with the residual at fixed gridpoints, against 0.
    pub correlations: Vec<BandCheck>,
    pub pass: bool,
}

/// Splits centered-bridge paths into grid mean `Z` and residual and checks the
/// decomposition statistically (3 standard-error bands).
pub fn decomposition_check(replicates: usize, n: usize, m: usize, seed: u64) -> Result<DecompositionReport> {
    if n < 16 {
        return Err(Error::InvalidArgument("decomposition check needs n ≥ 16".into()));
    }
    if replicates < 2 {
        return Err(Error::InvalidArgument("decomposition check needs at least 2 replicates".into()));
    }
    let ensemble = bridge_ensemble(BridgeVariant::CenteredShift, n, m, replicates, seed)?;
    let offsets: Vec<f64> = ensemble.paths().iter().map(GridPath::mean).collect();
    let residual = ensemble.map_paths(|p| {
        let z = p.mean();
        p.map(|v| v - z)
    });
    drop(ensemble);

    let squares: Vec<f64> = offsets.iter().map(|z| z * z).collect();
    let (var_z, var_se) = mean_se(&squares);
    let offset_variance = BandCheck::three_sigma("Var(Z)", var_z, 1.0 / 12.0, var_se);

    let lags: Vec<usize> = [0, 1, 2, 3, 4, 5, 6, 8].iter().map(|i| i * n / 16).collect();
    let centralized = ClosedForm::CentralizedBridge;
    let residual_covariogram = empirical_covariogram(&residual, &lags)?
        .into_iter()
        .map(|est| {
            BandCheck::three_sigma(
                format!("C(δ={})", est.delta),
                est.value,
                centralized.eval(est.delta),
                est.std_error,
            )
        })
        .collect();

    let corr_se = 1.0 / (replicates as f64).sqrt();
    let correlations = (0..8)
        .map(|i| {
            let j = i * n / 8 + n / 16;
            let at: Vec<f64> = residual.paths().iter().map(|p| p.values()[j]).collect();
            BandCheck::three_sigma(
                format!("corr(Z, x(t={}))", j as f64 / n as f64),
                correlation(&offsets, &at),
                0.0,
                corr_se,
            )
        })
        .collect::<Vec<_>>();

    let mut report = DecompositionReport {
        replicates,
        n,
        sine_terms: m,
        offset_variance,
        residual_covariogram,
        correlations,
        pass: false,
    };
    report.pass = report.offset_variance.pass
        && report.residual_covariogram.iter().all(|c| c.pass)
        && report.correlations.iter().all(|c| c.pass);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProofIdentity {
    pub k: u64,
    pub terms: u64,
    pub partial_sum: f64,
    pub target: f64,
    pub gap: f64,
}

/// Partial sum of `(1/(k²π⁴)) Σ_{m≥0} (1/(2k+2m+1) + 1/(2k-2m-1))²`, whose limit is
/// `1/(4k²π²)`: the variance balance that makes each centered-bridge coefficient Gaussian.
pub fn proof_identity(k: u64, terms: u64) -> Result<ProofIdentity> {
    if k == 0 || terms == 0 {
        return Err(Error::InvalidArgument("proof identity needs k ≥ 1 and terms ≥ 1".into()));
    }
    let kf = k as f64;
    // smallest terms first
    let sum: f64 = (0..terms)
        .rev()
        .map(|m| {
            let m = m as f64;
            let v = 1.0 / (2.0 * kf + 2.0 * m + 1.0) + 1.0 / (2.0 * kf - 2.0 * m - 1.0);
            v * v
        })
        .sum();
    let partial_sum = sum / (kf * kf * PI.powi(4));
    let target = 1.0 / (4.0 * kf * kf * PI * PI);
    Ok(ProofIdentity { k, terms, partial_sum, target, gap: (target - partial_sum).abs() })
}
