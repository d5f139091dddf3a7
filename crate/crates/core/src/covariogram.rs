//! Stationary covariance functions `C̃(δ)` on the circle.

use crate::coefficients::SpectralCoefficients;
use crate::error::{Error, Result};
use crate::grid::check_grid;

/// Relative tolerance for the symmetry and dominance checks on sampled tables.
const TABLE_TOL: f64 = 1e-9;

/// Closed-form covariograms known to the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// `(|δ| - 1/2)²/2 + 1/24`: the shift-randomized Brownian bridge.
    CenteredBridge,
    /// `(|δ| - 1/2)²/2 - 1/24`: the bridge minus its time average.
    CentralizedBridge,
    /// `c0² + 2Σ c_k² cos(2πkδ)` over the explicit coefficients.
    FromCoefficients(SpectralCoefficients),
}

impl ClosedForm {
    /// Evaluates at `δ`, reduced to its fractional part.
    pub fn eval(&self, delta: f64) -> f64 {
        let d = delta - delta.floor();
        match self {
            ClosedForm::CenteredBridge => (d - 0.5).powi(2) / 2.0 + 1.0 / 24.0,
            ClosedForm::CentralizedBridge => (d - 0.5).powi(2) / 2.0 - 1.0 / 24.0,
            ClosedForm::FromCoefficients(c) => {
                let w = 2.0 * std::f64::consts::PI * d;
                c.c0() * c.c0()
                    + 2.0
                        * c.harmonics()
                            .iter()
                            .enumerate()
                            .map(|(i, ck)| ck * ck * (w * (i + 1) as f64).cos())
                            .sum::<f64>()
            }
        }
    }
}

/// Covariogram values `C̃(j/n)` on a power-of-two grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCovariogram {
    values: Vec<f64>,
}

impl SampledCovariogram {
    /// Validates a table: finite, symmetric `C̃(j/n) = C̃(1 - j/n)`, and
    /// `C̃(0) ≥ |C̃(δ)|`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid(values.len(), 1)?;
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let n = values.len();
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = TABLE_TOL * scale;
        for j in 1..n {
            if (values[j] - values[n - j]).abs() > tol {
                return Err(Error::InvalidCovariogram(format!(
                    "not symmetric: C({j}/{n}) = {} but C({}/{n}) = {}",
                    values[j],
                    n - j,
                    values[n - j]
                )));
            }
        }
        if let Some(j) = (0..n).find(|&j| values[j].abs() > values[0] + tol) {
            return Err(Error::InvalidCovariogram(format!(
                "|C({j}/{n})| = {} exceeds the variance C(0) = {}",
                values[j].abs(),
                values[0]
            )));
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `C̃(0)`.
    pub fn variance(&self) -> f64 {
        self.values[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Covariogram {
    ClosedForm(ClosedForm),
    Sampled(SampledCovariogram),
}

impl Covariogram {
    pub fn centered_bridge() -> Self {
        Covariogram::ClosedForm(ClosedForm::CenteredBridge)
    }

    pub fn centralized_bridge() -> Self {
        Covariogram::ClosedForm(ClosedForm::CentralizedBridge)
    }

    /// Values on the grid `j/n`. Closed forms are sampled with their `|δ|` kink on the
    /// grid point `j = 0`; a sampled table only answers for its own grid size.
    pub fn sample(&self, n: usize) -> Result<Vec<f64>> {
        check_grid(n, 1)?;
        match self {
            Covariogram::ClosedForm(f) => Ok((0..n).map(|j| f.eval(j as f64 / n as f64)).collect()),
            Covariogram::Sampled(s) if s.n() == n => Ok(s.values.clone()),
            Covariogram::Sampled(s) => Err(Error::InvalidArgument(format!(
                "covariogram table has {} points, requested {n}",
                s.n()
            ))),
        }
    }

    /// Grid size to use by default: 4096 for closed forms, the table size otherwise.
    pub fn default_grid(&self) -> usize {
        match self {
            Covariogram::ClosedForm(_) => 4096,
            Covariogram::Sampled(s) => s.n(),
        }
    }
}
