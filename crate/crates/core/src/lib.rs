//! Periodic stationary Gaussian processes on the unit circle.
//!
//! A process is described by nonnegative spectral coefficients `c0, c1, …`:
//!
//! ```text
//! x_t = c0 Y'_0 + √2 Σ_{k≥1} c_k (Y_k sin 2πkt + Y'_k cos 2πkt)
//! ```
//!
//! with i.i.d. standard normal `Y`, `Y'`. Its covariogram is
//! `C̃(δ) = c0² + 2 Σ c_k² cos 2πkδ`. The crate converts between the two descriptions,
//! samples paths on power-of-two grids, predicts and estimates path regularity,
//! decomposes the Brownian bridge into stationary pieces and fits the family
//! `c_k = a/k^p` by maximum likelihood.

pub mod bridge;
pub mod coefficients;
pub mod covariogram;
pub mod dft;
pub mod error;
pub mod fit;
pub mod io;
pub mod regularity;
pub mod special;
pub mod spectral;
pub mod stats;
pub mod synthesis;
pub mod grid;

pub use coefficients::{CoefficientFile, DecayTail, ParametricModel, SpectralCoefficients};
pub use covariogram::{ClosedForm, Covariogram, SampledCovariogram};
pub use dft::{analyze, cosine_quadrature, synthesize, HarmonicDecomposition};
pub use error::{Error, Result};
pub use fit::{fit_mle, goodness_of_fit, model_coefficients, FitResult, GoodnessOfFit};
pub use grid::{GridPath, PathEnsemble, StreamSeed};
pub use regularity::{estimate_holder, fit_decay, predict_regularity, structure_function, DyadicWindow};
pub use spectral::{coeffs_to_covariogram, covariogram_to_coeffs, empirical_coeffs};
pub use synthesis::{empirical_covariogram, sample_ensemble, sample_path, truncation_index};
