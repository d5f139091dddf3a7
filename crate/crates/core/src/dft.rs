//! Real-input harmonic analysis on the periodic grid and the matching quadrature.
//!
//! A path `x_j = x(j/n)` is decomposed as
//!
//! ```text
//! x_j = mean + Σ_{k=1}^{n/2-1} (sin_k sin(2πkj/n) + cos_k cos(2πkj/n)) + nyquist·(-1)^j
//! ```
//!
//! which is exact for every real sequence of length `n`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{check_grid, GridPath};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicDecomposition {
    n: usize,
    mean: f64,
    sin: Vec<f64>,
    cos: Vec<f64>,
    nyquist: f64,
}

impl HarmonicDecomposition {
    /// All-zero decomposition for grid size `n`.
    pub fn zeros(n: usize) -> Result<Self> {
        check_grid(n, 4)?;
        let h = n / 2 - 1;
        Ok(Self { n, mean: 0.0, sin: vec![0.0; h], cos: vec![0.0; h], nyquist: 0.0 })
    }

    /// Builds a decomposition from explicit parts; `sin` and `cos` hold harmonics
    /// `1..=len` and are zero-padded up to `n/2 - 1`.
    pub fn from_parts(n: usize, mean: f64, sin: &[f64], cos: &[f64], nyquist: f64) -> Result<Self> {
        let mut h = Self::zeros(n)?;
        let limit = n / 2 - 1;
        if sin.len() > limit || cos.len() > limit {
            return Err(Error::Aliasing { harmonic: sin.len().max(cos.len()), n });
        }
        h.mean = mean;
        h.sin[..sin.len()].copy_from_slice(sin);
        h.cos[..cos.len()].copy_from_slice(cos);
        h.nyquist = nyquist;
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn nyquist(&self) -> f64 {
        self.nyquist
    }

    /// Number of regular harmonics, `n/2 - 1`.
    pub fn harmonics(&self) -> usize {
        self.sin.len()
    }

    /// Sine amplitude of harmonic `k ≥ 1`.
    pub fn sin(&self, k: usize) -> f64 {
        self.sin[k - 1]
    }

    /// Cosine amplitude of harmonic `k ≥ 1`.
    pub fn cos(&self, k: usize) -> f64 {
        self.cos[k - 1]
    }

    pub fn sin_coefs(&self) -> &[f64] {
        &self.sin
    }

    pub fn cos_coefs(&self) -> &[f64] {
        &self.cos
    }

    /// `sin_k² + cos_k²`.
    pub fn power(&self, k: usize) -> f64 {
        self.sin[k - 1].powi(2) + self.cos[k - 1].powi(2)
    }

    /// Right-hand side of Parseval's identity, equal to `(1/n) Σ x_j²`.
    pub fn energy(&self) -> f64 {
        let harm: f64 = self.sin.iter().zip(&self.cos).map(|(s, c)| s * s + c * c).sum();
        self.mean * self.mean + 0.5 * harm + self.nyquist * self.nyquist
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            mean: s * self.mean,
            sin: self.sin.iter().map(|v| s * v).collect(),
            cos: self.cos.iter().map(|v| s * v).collect(),
            nyquist: s * self.nyquist,
        }
    }
}

/// Harmonic decomposition of a sampled path (`n ≥ 4`, power of two).
pub fn analyze(path: &GridPath) -> Result<HarmonicDecomposition> {
    analyze_values(path.values())
}

pub(crate) fn analyze_values(x: &[f64]) -> Result<HarmonicDecomposition> {
    let n = x.len();
    check_grid(n, 4)?;
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    forward_plan(n).process(&mut buf);
    let nf = n as f64;
    let half = n / 2;
    let scale = 2.0 / nf;
    Ok(HarmonicDecomposition {
        n,
        mean: buf[0].re / nf,
        sin: (1..half).map(|k| -scale * buf[k].im).collect(),
        cos: (1..half).map(|k| scale * buf[k].re).collect(),
        nyquist: buf[half].re / nf,
    })
}

/// Inverse of [`analyze`].
pub fn synthesize(h: &HarmonicDecomposition) -> GridPath {
    GridPath::from_raw(synthesize_values(h), None)
}

pub(crate) fn synthesize_values(h: &HarmonicDecomposition) -> Vec<f64> {
    let n = h.n;
    let half = n / 2;
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    buf[0] = Complex::new(h.mean, 0.0);
    for k in 1..half {
        let z = Complex::new(0.5 * h.cos[k - 1], -0.5 * h.sin[k - 1]);
        buf[k] = z;
        buf[n - k] = z.conj();
    }
    buf[half] = Complex::new(h.nyquist, 0.0);
    inverse_plan(n).process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Rectangle-rule value of `∫₀¹ f(s) cos(2πks) ds` from samples `f(j/n)`.
///
/// On a periodic uniform grid this coincides with the trapezoid rule. Requires `k < n/2`.
pub fn cosine_quadrature(f: &[f64], k: usize) -> Result<f64> {
    let n = f.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    if 2 * k >= n && k > 0 {
        return Err(Error::Aliasing { harmonic: k, n });
    }
    let step = 2.0 * PI / n as f64;
    let sum: f64 = f
        .iter()
        .enumerate()
        .map(|(j, &v)| v * (step * ((k * j) % n) as f64).cos())
        .sum();
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct(x: &[f64]) -> HarmonicDecomposition {
        let n = x.len();
        let nf = n as f64;
        let w = 2.0 * PI / nf;
        let sin = (1..n / 2)
            .map(|k| 2.0 / nf * x.iter().enumerate().map(|(j, v)| v * (w * (k * j) as f64).sin()).sum::<f64>())
            .collect();
        let cos = (1..n / 2)
            .map(|k| 2.0 / nf * x.iter().enumerate().map(|(j, v)| v * (w * (k * j) as f64).cos()).sum::<f64>())
            .collect();
        let nyq = x.iter().enumerate().map(|(j, v)| if j % 2 == 0 { *v } else { -v }).sum::<f64>() / nf;
        HarmonicDecomposition { n, mean: x.iter().sum::<f64>() / nf, sin, cos, nyquist: nyq }
    }

    fn close(a: &HarmonicDecomposition, b: &HarmonicDecomposition, tol: f64) -> bool {
        (a.mean - b.mean).abs() < tol
            && (a.nyquist - b.nyquist).abs() < tol
            && a.sin.iter().zip(&b.sin).all(|(x, y)| (x - y).abs() < tol)
            && a.cos.iter().zip(&b.cos).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn constant_path() {
        let h = analyze(&GridPath::new(vec![5.0; 8]).unwrap()).unwrap();
        assert!((h.mean() - 5.0).abs() < 1e-15);
        assert!(h.sin_coefs().iter().chain(h.cos_coefs()).all(|v| v.abs() < 1e-14));
        assert!(h.nyquist().abs() < 1e-15);
    }

    #[test]
    fn single_sine() {
        let p = GridPath::from_fn(16, |t| (2.0 * PI * 3.0 * t).sin()).unwrap();
        let h = analyze(&p).unwrap();
        for k in 1..8 {
            let expect = if k == 3 { 1.0 } else { 0.0 };
            assert!((h.sin(k) - expect).abs() < 1e-12);
            assert!(h.cos(k).abs() < 1e-12);
        }
        assert!(h.mean().abs() < 1e-12 && h.nyquist().abs() < 1e-12);
    }

    #[test]
    fn mixed_tones() {
        let p = GridPath::from_fn(8, |t| (2.0 * PI * t).cos() + 2.0 * (2.0 * PI * 2.0 * t).sin()).unwrap();
        let h = analyze(&p).unwrap();
        let oracle = direct(p.values());
        assert!(close(&h, &oracle, 1e-12));
        assert!((h.cos(1) - 1.0).abs() < 1e-12);
        assert!((h.sin(2) - 2.0).abs() < 1e-12);
        assert!(h.sin(1).abs() < 1e-12 && h.cos(2).abs() < 1e-12 && h.sin(3).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_or_odd_grids() {
        assert!(matches!(analyze_values(&[1.0; 12]), Err(Error::NotPowerOfTwo(12))));
        assert!(analyze_values(&[1.0; 2]).is_err());
    }

    #[test]
    fn synthesize_simple() {
        let z = HarmonicDecomposition::zeros(8).unwrap();
        assert!(synthesize(&z).values().iter().all(|&v| v == 0.0));
        let m = HarmonicDecomposition::from_parts(8, 1.0, &[], &[], 0.0).unwrap();
        assert!(synthesize(&m).values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn quadrature_basics() {
        assert!((cosine_quadrature(&[1.0; 16], 0).unwrap() - 1.0).abs() < 1e-15);
        assert!(cosine_quadrature(&[1.0; 16], 3).unwrap().abs() < 1e-15);
        assert!(matches!(cosine_quadrature(&[1.0; 16], 8), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn quadrature_of_bridge_covariogram() {
        let n = 4096;
        let f: Vec<f64> = (0..n)
            .map(|j| {
                let s = j as f64 / n as f64;
                (s - 0.5).powi(2) / 2.0 + 1.0 / 24.0
            })
            .collect();
        let v = cosine_quadrature(&f, 2).unwrap();
        assert!((v - 1.0 / (16.0 * PI * PI)).abs() < 1e-7);
        assert!((v - 0.0063326).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn fft_matches_direct_and_round_trips(x in proptest::collection::vec(-10.0f64..10.0, 64)) {
            let h = analyze_values(&x).unwrap();
            prop_assert!(close(&h, &direct(&x), 1e-11));
            let back = synthesize_values(&h);
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let energy = x.iter().map(|v| v * v).sum::<f64>() / 64.0;
            prop_assert!((h.energy() - energy).abs() <= 1e-10 * energy.max(1e-300));
        }

        #[test]
        fn decomposition_round_trip(
            mean in -5.0f64..5.0, nyq in -5.0f64..5.0,
            s in proptest::collection::vec(-5.0f64..5.0, 31),
            c in proptest::collection::vec(-5.0f64..5.0, 31),
        ) {
            let h = HarmonicDecomposition::from_parts(64, mean, &s, &c, nyq).unwrap();
            let again = analyze(&synthesize(&h)).unwrap();
            prop_assert!(close(&h, &again, 1e-10 * 5.0));
        }

        #[test]
        fn linearity(
            x in proptest::collection::vec(-10.0f64..10.0, 32),
            y in proptest::collection::vec(-10.0f64..10.0, 32),
            a in -3.0f64..3.0, b in -3.0f64..3.0,
        ) {
            let z: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
            let hx = analyze_values(&x).unwrap();
            let hy = analyze_values(&y).unwrap();
            let hz = analyze_values(&z).unwrap();
            prop_assert!((hz.mean - (a * hx.mean + b * hy.mean)).abs() < 1e-12 * 100.0);
            for k in 1..16 {
                prop_assert!((hz.sin(k) - (a * hx.sin(k) + b * hy.sin(k))).abs() < 1e-12 * 100.0);
                prop_assert!((hz.cos(k) - (a * hx.cos(k) + b * hy.cos(k))).abs() < 1e-12 * 100.0);
            }
        }

        #[test]
        fn quadrature_consistent_with_analyze(x in proptest::collection::vec(-10.0f64..10.0, 32)) {
            let h = analyze_values(&x).unwrap();
            prop_assert!((cosine_quadrature(&x, 0).unwrap() - h.mean()).abs() < 1e-12);
            for k in 1..16 {
                prop_assert!((cosine_quadrature(&x, k).unwrap() - 0.5 * h.cos(k)).abs() < 1e-12);
            }
        }
    }
}
