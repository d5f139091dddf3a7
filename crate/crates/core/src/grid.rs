//! Discretized trajectories on the uniform periodic grid `t_j = j/n`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Checks that `n` is a power of two no smaller than `min`.
pub fn check_grid(n: usize, min: usize) -> Result<()> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n < min {
        return Err(Error::InvalidArgument(format!("grid size {n} is below the minimum {min}")));
    }
    Ok(())
}

/// A reproducible random stream: `(seed, stream)` always yields the same draws and
/// distinct streams of one seed are independent ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSeed {
    pub seed: u64,
    pub stream: u64,
}

impl StreamSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    values: Vec<f64>,
    seed_tag: Option<StreamSeed>,
}

impl GridPath {
    /// Wraps samples `x(j/n)`, `j = 0..n`. `n` must be a power of two.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid(values.len(), 1)?;
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values, seed_tag: None })
    }

    /// Samples `f(j/n)`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(n, 1)?;
        Self::new((0..n).map(|j| f(j as f64 / n as f64)).collect())
    }

    pub(crate) fn from_raw(values: Vec<f64>, seed_tag: Option<StreamSeed>) -> Self {
        debug_assert!(values.len().is_power_of_two());
        Self { values, seed_tag }
    }

    pub fn with_seed_tag(mut self, tag: StreamSeed) -> Self {
        self.seed_tag = Some(tag);
        self
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed_tag(&self) -> Option<StreamSeed> {
        self.seed_tag
    }

    /// Value at `t = j/n` with periodic wraparound, so `at(n) == at(0)`.
    pub fn at(&self, j: usize) -> f64 {
        self.values[j % self.values.len()]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { values: self.values.iter().map(|v| s * v).collect(), seed_tag: self.seed_tag }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect(), seed_tag: self.seed_tag }
    }

    /// The path `t ↦ x(⟨t - shift/n⟩)`: a circular rotation by `shift` grid steps.
    pub fn shifted(&self, shift: usize) -> Self {
        let n = self.values.len();
        let shift = shift % n;
        let values = (0..n).map(|j| self.values[(j + n - shift) % n]).collect();
        Self { values, seed_tag: self.seed_tag }
    }
}

/// Independent replicate paths on a common grid.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    n: usize,
    paths: Vec<GridPath>,
    master_seed: Option<u64>,
}

impl PathEnsemble {
    pub fn new(paths: Vec<GridPath>, master_seed: Option<u64>) -> Result<Self> {
        let first = paths.first().ok_or(Error::EmptyEnsemble)?;
        let n = first.n();
        if paths.iter().any(|p| p.n() != n) {
            return Err(Error::InvalidArgument("ensemble paths must share a grid size".into()));
        }
        Ok(Self { n, paths, master_seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[GridPath] {
        &self.paths
    }

    pub fn master_seed(&self) -> Option<u64> {
        self.master_seed
    }

    pub fn map_paths(&self, f: impl Fn(&GridPath) -> GridPath) -> Self {
        Self { n: self.n, paths: self.paths.iter().map(f).collect(), master_seed: self.master_seed }
    }

    pub fn into_paths(self) -> Vec<GridPath> {
        self.paths
    }
}
