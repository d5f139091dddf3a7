//! Spectral coefficients: the ℓ² sequence that identifies a periodic stationary
//! Gaussian process.
//!
//! The canonical series used throughout the crate is
//!
//! ```text
//! x_t = c0·Y'0 + √2·Σ_k c_k (Y_k sin(2πkt) + Y'_k cos(2πkt))
//! ```
//!
//! so the covariogram is `C̃(δ) = c0² + 2Σ c_k² cos(2πkδ)` and `c_k² = ∫ C̃(s) cos(2πks) ds`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::zeta_tail;

/// Power-law description of `c_k²` beyond the explicit coefficients:
/// `c_k² = constant · k^{-q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayTail {
    pub q: f64,
    #[serde(rename = "const")]
    pub constant: f64,
}

impl DecayTail {
    pub fn new(q: f64, constant: f64) -> Result<Self> {
        if !q.is_finite() || !constant.is_finite() {
            return Err(Error::InvalidArgument("tail parameters must be finite".into()));
        }
        if q <= 1.0 {
            return Err(Error::TailUnknown(format!(
                "declared tail exponent q = {q} has no finite spectral mass (need q > 1)"
            )));
        }
        if constant < 0.0 {
            return Err(Error::NegativeSpectralMass { index: usize::MAX, value: constant });
        }
        Ok(Self { q, constant })
    }

    /// `c_k` for a harmonic in the tail.
    pub fn coefficient(&self, k: usize) -> f64 {
        (self.constant * (k as f64).powf(-self.q)).sqrt()
    }

    /// `Σ_{k ≥ start} c_k²`.
    pub fn mass_from(&self, start: usize) -> f64 {
        self.constant * zeta_tail(self.q, start as u64)
    }
}

/// Nonnegative spectral coefficients `(c0, c_1, …, c_L)` with an optional analytic tail
/// for `k > L`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    c0: f64,
    c: Vec<f64>,
    tail: Option<DecayTail>,
}

/// Clamp tolerance for numerically negative spectral mass.
pub(crate) fn clamp_tolerance(scale: f64) -> f64 {
    (1e-9 * scale).max(1e-12)
}

impl SpectralCoefficients {
    /// Strict constructor: every entry must be finite and nonnegative.
    pub fn new(c0: f64, c: Vec<f64>, tail: Option<DecayTail>) -> Result<Self> {
        for (i, &v) in std::iter::once(&c0).chain(c.iter()).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if v < 0.0 {
                return Err(Error::NegativeSpectralMass { index: i, value: v });
            }
        }
        if let Some(t) = tail {
            DecayTail::new(t.q, t.constant)?;
        }
        Ok(Self { c0, c, tail })
    }

    /// Validates a raw sequence `(c0, c_1, …)`, clamping entries within `-tol` of zero.
    ///
    /// `tol = max(1e-9·c0², 1e-12)`. Entries below `-tol` are rejected.
    pub fn validate(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient sequence".into()));
        }
        if let Some(index) = raw.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let tol = clamp_tolerance(raw[0] * raw[0]);
        let mut out = Vec::with_capacity(raw.len());
        for (index, &v) in raw.iter().enumerate() {
            if v < -tol {
                return Err(Error::NegativeSpectralMass { index, value: v });
            }
            out.push(v.max(0.0));
        }
        let c0 = out.remove(0);
        Ok(Self { c0, c: out, tail: None })
    }

    /// Attaches (or replaces) the analytic tail.
    pub fn with_tail(mut self, tail: DecayTail) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Explicit harmonic coefficients; index 0 holds `c_1`.
    pub fn harmonics(&self) -> &[f64] {
        &self.c
    }

    pub fn tail(&self) -> Option<&DecayTail> {
        self.tail.as_ref()
    }

    pub fn explicit_len(&self) -> usize {
        self.c.len()
    }

    /// Highest harmonic with nonzero mass, or `None` when a tail makes the support infinite.
    pub fn support(&self) -> Option<usize> {
        match self.tail {
            Some(t) if t.constant > 0.0 => None,
            _ => Some(self.c.iter().rposition(|&v| v > 0.0).map_or(0, |i| i + 1)),
        }
    }

    /// `c_k` for any `k ≥ 0`, reading the tail past the explicit entries.
    pub fn coefficient(&self, k: usize) -> f64 {
        if k == 0 {
            self.c0
        } else if k <= self.c.len() {
            self.c[k - 1]
        } else {
            self.tail.map_or(0.0, |t| t.coefficient(k))
        }
    }

    /// The first `k_max` harmonics with everything beyond dropped.
    pub fn truncated(&self, k_max: usize) -> Self {
        Self {
            c0: self.c0,
            c: (1..=k_max).map(|k| self.coefficient(k)).collect(),
            tail: None,
        }
    }

    /// `2 Σ_{k > k_from} c_k²`, including the analytic tail.
    pub fn tail_energy(&self, k_from: usize) -> f64 {
        let explicit: f64 = self.c.iter().skip(k_from).map(|v| v * v).sum();
        let analytic = match self.tail {
            Some(t) => t.mass_from(self.c.len().max(k_from) + 1),
            None => 0.0,
        };
        2.0 * (explicit + analytic)
    }

    /// `c0² + 2Σ c_k²`: the variance `C̃(0)` of the represented process.
    pub fn total_mass(&self) -> f64 {
        self.c0 * self.c0 + self.tail_energy(0)
    }

    /// The H-norm `√(c0² + 2Σ c_k²)`.
    pub fn h_norm(&self) -> f64 {
        self.total_mass().sqrt()
    }

    /// Coefficients of the process `s·x_t`.
    pub fn scaled(&self, s: f64) -> Self {
        let s = s.abs();
        Self {
            c0: s * self.c0,
            c: self.c.iter().map(|v| s * v).collect(),
            tail: self.tail.map(|t| DecayTail { q: t.q, constant: s * s * t.constant }),
        }
    }

    pub fn to_file(&self) -> CoefficientFile {
        CoefficientFile { c0: self.c0, c: self.c.clone(), tail: self.tail }
    }
}

/// On-disk JSON layout: `{ "c0": …, "c": […], "tail": {"q": …, "const": …} | null }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub c0: f64,
    pub c: Vec<f64>,
    #[serde(default)]
    pub tail: Option<DecayTail>,
}

impl TryFrom<CoefficientFile> for SpectralCoefficients {
    type Error = Error;

    fn try_from(f: CoefficientFile) -> Result<Self> {
        let mut raw = Vec::with_capacity(f.c.len() + 1);
        raw.push(f.c0);
        raw.extend_from_slice(&f.c);
        let coeffs = Self::validate(&raw)?;
        match f.tail {
            Some(t) => Ok(coeffs.with_tail(DecayTail::new(t.q, t.constant)?)),
            None => Ok(coeffs),
        }
    }
}

/// The amplitude/decay family `c_k = a / k^p`, `c0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParametricModel {
    a: f64,
    p: f64,
}

impl ParametricModel {
    pub fn new(a: f64, p: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
        }
        if !(p.is_finite() && p > 0.5) {
            return Err(Error::InvalidArgument(format!("p must exceed 1/2, got {p}")));
        }
        Ok(Self { a, p })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn validate_accepts_valid() {
        let c = SpectralCoefficients::validate(&[1.0, 0.5, 0.25]).unwrap();
        assert_eq!(c.c0(), 1.0);
        assert_eq!(c.harmonics(), &[0.5, 0.25]);
    }

    #[test]
    fn validate_clamps_noise() {
        let c = SpectralCoefficients::validate(&[1.0, -1e-15, 0.25]).unwrap();
        assert_eq!(c.harmonics(), &[0.0, 0.25]);
    }

    #[test]
    fn validate_rejects_negative_mass() {
        let err = SpectralCoefficients::validate(&[1.0, -0.3]).unwrap_err();
        assert!(matches!(err, Error::NegativeSpectralMass { index: 1, .. }));
        assert!(err.to_string().contains("negative spectral mass"));
    }

    #[test]
    fn validate_rejects_non_finite() {
        assert!(matches!(
            SpectralCoefficients::validate(&[1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(SpectralCoefficients::validate(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn validate_is_idempotent() {
        let once = SpectralCoefficients::validate(&[2.0, -1e-10, 0.3, 0.0]).unwrap();
        let mut raw = vec![once.c0()];
        raw.extend_from_slice(once.harmonics());
        let twice = SpectralCoefficients::validate(&raw).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn h_norm_simple() {
        let c = SpectralCoefficients::validate(&[1.0]).unwrap();
        assert_eq!(c.h_norm(), 1.0);
        let c = SpectralCoefficients::validate(&[0.0, 1.0]).unwrap();
        assert!((c.h_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn h_norm_of_bridge_tail() {
        let c = SpectralCoefficients::new(1.0 / 12f64.sqrt(), vec![], None)
            .unwrap()
            .with_tail(DecayTail::new(2.0, 1.0 / (4.0 * PI * PI)).unwrap());
        // oracle: brute partial sum to 10^6 plus the 1/N remainder
        let n = 1_000_000;
        let partial: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let brute = (1.0 / 12.0 + 2.0 / (4.0 * PI * PI) * (partial + 1.0 / n as f64)).sqrt();
        assert!((c.h_norm() - brute).abs() < 1e-10);
        assert!((c.h_norm() - (1.0f64 / 6.0).sqrt()).abs() < 1e-14);
        assert!((c.h_norm() - 0.40825).abs() < 1e-5);
    }

    #[test]
    fn coefficient_reads_tail() {
        let c = SpectralCoefficients::new(0.0, vec![1.0, 0.5], None)
            .unwrap()
            .with_tail(DecayTail::new(2.0, 1.0).unwrap());
        assert_eq!(c.coefficient(2), 0.5);
        assert!((c.coefficient(4) - 0.25).abs() < 1e-15);
        assert_eq!(c.support(), None);
        assert_eq!(c.truncated(3).support(), Some(3));
    }

    #[test]
    fn tail_must_be_summable() {
        assert!(matches!(DecayTail::new(1.0, 1.0), Err(Error::TailUnknown(_))));
    }

    #[test]
    fn model_bounds() {
        assert!(ParametricModel::new(1.0, 0.4).is_err());
        assert!(ParametricModel::new(0.0, 1.0).is_err());
        assert!(ParametricModel::new(1.0, 0.51).is_ok());
    }

    #[test]
    fn json_layout() {
        let c = SpectralCoefficients::validate(&[1.0, 0.5]).unwrap().with_tail(DecayTail {
            q: 2.0,
            constant: 0.25,
        });
        let s = serde_json::to_string(&c.to_file()).unwrap();
        assert_eq!(s, r#"{"c0":1.0,"c":[0.5],"tail":{"q":2.0,"const":0.25}}"#);
        let back: CoefficientFile = serde_json::from_str(r#"{"c0":1.0,"c":[0.5],"tail":null}"#).unwrap();
        let back = SpectralCoefficients::try_from(back).unwrap();
        assert!(back.tail().is_none());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn h_norm_homogeneous(raw in proptest::collection::vec(0.0f64..10.0, 1..40), s in 0.0f64..100.0) {
                let c = SpectralCoefficients::validate(&raw).unwrap();
                let lhs = c.scaled(s).h_norm();
                let rhs = s * c.h_norm();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
            }

            #[test]
            fn validate_idempotent(raw in proptest::collection::vec(-1e-13f64..10.0, 1..40)) {
                let once = SpectralCoefficients::validate(&raw).unwrap();
                let mut again = vec![once.c0()];
                again.extend_from_slice(once.harmonics());
                prop_assert_eq!(SpectralCoefficients::validate(&again).unwrap(), once);
            }
        }
    }
}
