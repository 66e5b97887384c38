//! Roughness estimation from antiderivatives on dyadic grids.
//!
//! A path `x` is observed only through its antiderivative `y(t) = ∫_0^t x`,
//! sampled on `T_N = {j 2^-N}`. The crate provides Faber–Schauder tools,
//! the roughness estimators `R̂_n`, `R̂*_n`, `R̃_n` and the scale-invariant
//! sequential estimator `R^s_n`, fBM/fOU generators, Gaussian error theory,
//! and a Monte Carlo harness.

pub mod error;
pub mod estimators;
pub mod faber_schauder;
pub mod generators;
pub mod grid;
pub mod harness;
pub mod numeric;
pub mod scale;
pub mod theory;

pub use error::{Result, RoughnessError};
pub use estimators::{p_variation, rhat, rhat_series, rhat_star, rtilde, vartheta_coeffs, VarthetaVector};
pub use faber_schauder::{analyze, synthesize, takagi_antiderivative, takagi_landsberg, FaberSchauderCoeffs};
pub use grid::{DyadicIndex, SampledPath};
pub use scale::{beta_weights, seq_scale_estimate, seq_scale_factor, ScaleConfig, ScaleResult};
