use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::rng::path_rng;
use crate::error::{invalid, level_error, Result, RoughnessError};
use crate::grid::SampledPath;
use crate::numeric::prefix_sums;

/// Default upper bound on the fBM grid level.
pub const DEFAULT_MAX_FBM_LEVEL: u32 = 22;

/// Largest level at which the dense Cholesky factor is built.
pub const MAX_CHOLESKY_LEVEL: u32 = 12;

/// Relative size of a negative embedding eigenvalue that is treated as
/// rounding noise and clamped to zero.
const EIGEN_TOLERANCE: f64 = 1e-10;

/// Fractional Brownian motion on `T_level`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FbmSpec {
    pub hurst: f64,
    pub level: u32,
    pub seed: u64,
}

impl FbmSpec {
    pub fn new(hurst: f64, level: u32, seed: u64) -> Result<Self> {
        check_hurst(hurst)?;
        Ok(Self { hurst, level, seed })
    }
}

pub(crate) fn check_hurst(hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(invalid(format!("Hurst parameter {hurst} must lie in (0, 1)")));
    }
    Ok(())
}

/// Autocovariance of unit-step fractional Gaussian noise,
/// `(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2`.
pub fn fgn_autocovariance(hurst: f64, lag: usize) -> f64 {
    let k = lag as f64;
    let e = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// How a [`FbmGenerator`] turns normals into fGn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FbmMethod {
    CirculantEmbedding,
    Cholesky,
}

enum Sampler {
    Circulant {
        /// `sqrt(λ_k / M)` for the `M = 2n` embedding eigenvalues.
        amplitudes: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Cholesky {
        lower: DMatrix<f64>,
    },
}

/// Precomputed sampler for fBM with fixed `H` and level.
///
/// Construction does the expensive part (embedding eigenvalues or the
/// covariance factor) once; [`FbmGenerator::sample`] then costs one FFT of
/// length `2^{level+1}` per path. The generator is `Send + Sync` and can be
/// shared across worker threads.
pub struct FbmGenerator {
    hurst: f64,
    level: u32,
    sampler: Sampler,
}

impl std::fmt::Debug for FbmGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FbmGenerator")
            .field("hurst", &self.hurst)
            .field("level", &self.level)
            .field("method", &self.method())
            .finish()
    }
}

impl FbmGenerator {
    /// Circulant embedding, falling back to Cholesky when the embedding has a
    /// genuinely negative eigenvalue and `level <= MAX_CHOLESKY_LEVEL`.
    pub fn new(hurst: f64, level: u32) -> Result<Self> {
        Self::with_max_level(hurst, level, DEFAULT_MAX_FBM_LEVEL)
    }

    pub fn with_max_level(hurst: f64, level: u32, max_level: u32) -> Result<Self> {
        check_hurst(hurst)?;
        if level > max_level {
            return Err(level_error(
                level as i64,
                format!("fBM level is capped at {max_level}"),
            ));
        }
        match Self::circulant(hurst, level) {
            Ok(g) => Ok(g),
            Err(RoughnessError::EmbeddingNotNonnegative(min)) if level <= MAX_CHOLESKY_LEVEL => {
                log::warn!("circulant embedding eigenvalue {min:e}; using Cholesky at level {level}");
                Self::cholesky(hurst, level)
            }
            Err(e) => Err(e),
        }
    }

    /// Davies–Harte / Wood–Chan sampler. Fails with
    /// [`RoughnessError::EmbeddingNotNonnegative`] if some eigenvalue is below
    /// `-1e-10` times the largest one.
    pub fn circulant(hurst: f64, level: u32) -> Result<Self> {
        check_hurst(hurst)?;
        let n = 1usize << level;
        let size = 2 * n;
        let mut row: Vec<Complex64> = Vec::with_capacity(size);
        row.extend((0..=n).map(|k| Complex64::new(fgn_autocovariance(hurst, k), 0.0)));
        row.extend((1..n).rev().map(|k| Complex64::new(fgn_autocovariance(hurst, k), 0.0)));
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re).fold(f64::MIN, f64::max);
        let min = row.iter().map(|c| c.re).fold(f64::MAX, f64::min);
        if min < -EIGEN_TOLERANCE * max {
            return Err(RoughnessError::EmbeddingNotNonnegative(min));
        }
        let amplitudes = row
            .iter()
            .map(|c| (c.re.max(0.0) / size as f64).sqrt())
            .collect();
        Ok(Self {
            hurst,
            level,
            sampler: Sampler::Circulant { amplitudes, fft },
        })
    }

    /// Dense Cholesky factor of the fGn covariance; `level <= 12`.
    pub fn cholesky(hurst: f64, level: u32) -> Result<Self> {
        check_hurst(hurst)?;
        if level > MAX_CHOLESKY_LEVEL {
            return Err(level_error(
                level as i64,
                format!("dense factorization is limited to level {MAX_CHOLESKY_LEVEL}"),
            ));
        }
        let n = 1usize << level;
        let acf: Vec<f64> = (0..n).map(|k| fgn_autocovariance(hurst, k)).collect();
        let cov = DMatrix::from_fn(n, n, |i, j| acf[i.abs_diff(j)]);
        let lower = cov
            .cholesky()
            .ok_or_else(|| RoughnessError::Factorization(format!("fGn covariance at level {level} is not positive definite")))?
            .unpack();
        Ok(Self {
            hurst,
            level,
            sampler: Sampler::Cholesky { lower },
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn method(&self) -> FbmMethod {
        match self.sampler {
            Sampler::Circulant { .. } => FbmMethod::CirculantEmbedding,
            Sampler::Cholesky { .. } => FbmMethod::Cholesky,
        }
    }

    /// Unit-step fGn `(W_{k+1} - W_k) 2^{H level}`, `k = 0..2^level`.
    pub fn sample_fgn<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = 1usize << self.level;
        match &self.sampler {
            Sampler::Circulant { amplitudes, fft } => {
                let mut buf: Vec<Complex64> = amplitudes
                    .iter()
                    .map(|&a| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(a * re, a * im)
                    })
                    .collect();
                fft.process(&mut buf);
                buf.truncate(n);
                buf.into_iter().map(|c| c.re).collect()
            }
            Sampler::Cholesky { lower } => {
                let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
                (lower * z).iter().copied().collect()
            }
        }
    }

    /// One fBM path on `T_level` with `W_0 = 0`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SampledPath {
        let scale = (-self.hurst * self.level as f64).exp2();
        let values = prefix_sums(self.sample_fgn(rng).into_iter().map(|g| g * scale));
        SampledPath::new(self.level, values).expect("finite fBM path")
    }
}

/// fBM path for `spec`, drawn from stream 0 of `spec.seed`.
pub fn fbm_sample(spec: &FbmSpec) -> Result<SampledPath> {
    let generator = FbmGenerator::new(spec.hurst, spec.level)?;
    Ok(generator.sample(&mut path_rng(spec.seed, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::p_variation;

    fn mc_paths(g: &FbmGenerator, paths: u64, seed: u64) -> Vec<SampledPath> {
        (0..paths).map(|i| g.sample(&mut path_rng(seed, i))).collect()
    }

    fn mean_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn autocovariance_values() {
        assert_eq!(fgn_autocovariance(0.5, 0), 1.0);
        assert_eq!(fgn_autocovariance(0.5, 3), 0.0);
        assert!((fgn_autocovariance(0.7, 1) - (2f64.powf(1.4) - 2.0) / 2.0).abs() < 1e-15);
        assert!(fgn_autocovariance(0.3, 2) < 0.0);
    }

    #[test]
    fn validation_and_guard() {
        assert!(FbmSpec::new(0.0, 4, 1).is_err());
        assert!(FbmSpec::new(1.0, 4, 1).is_err());
        assert!(FbmGenerator::with_max_level(0.3, 9, 8).is_err());
        assert!(FbmGenerator::cholesky(0.3, 13).is_err());
    }

    #[test]
    fn same_seed_same_path() {
        let spec = FbmSpec::new(0.3, 8, 11).unwrap();
        let a = fbm_sample(&spec).unwrap();
        let b = fbm_sample(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values()[0], 0.0);
        assert_ne!(a, fbm_sample(&FbmSpec { seed: 12, ..spec }).unwrap());
    }

    #[test]
    fn embedding_is_nonnegative_across_hurst() {
        for &h in &[0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            for level in [0, 1, 5, 12] {
                let g = FbmGenerator::new(h, level).unwrap();
                assert_eq!(g.method(), FbmMethod::CirculantEmbedding);
            }
        }
    }

    #[test]
    fn embedding_reproduces_autocovariance() {
        // sum_k a_k^2 cos(2 pi j k / M) must equal c(j) for j < n
        let h = 0.27;
        let g = FbmGenerator::circulant(h, 6).unwrap();
        let Sampler::Circulant { amplitudes, .. } = &g.sampler else {
            unreachable!()
        };
        let m = amplitudes.len();
        for j in 0..m / 2 {
            let cov: f64 = amplitudes
                .iter()
                .enumerate()
                .map(|(k, a)| a * a * (2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64).cos())
                .sum();
            assert!((cov - fgn_autocovariance(h, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_factor_reproduces_covariance() {
        let g = FbmGenerator::cholesky(0.8, 4).unwrap();
        let Sampler::Cholesky { lower } = &g.sampler else {
            unreachable!()
        };
        let cov = lower * lower.transpose();
        for i in 0..16 {
            for j in 0..16 {
                assert!((cov[(i, j)] - fgn_autocovariance(0.8, i.abs_diff(j))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn brownian_covariance() {
        let g = FbmGenerator::new(0.5, 6).unwrap();
        let paths = mc_paths(&g, 10_000, 1);
        let prods: Vec<f64> = paths.iter().map(|p| p.values()[16] * p.values()[48]).collect();
        let (mean, se) = mean_se(&prods);
        assert!((mean - 0.25).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn unit_variance_at_one() {
        for (h, seed) in [(0.3, 2), (0.7, 3)] {
            for method in [FbmMethod::CirculantEmbedding, FbmMethod::Cholesky] {
                let g = match method {
                    FbmMethod::CirculantEmbedding => FbmGenerator::circulant(h, 6).unwrap(),
                    FbmMethod::Cholesky => FbmGenerator::cholesky(h, 6).unwrap(),
                };
                let sq: Vec<f64> = mc_paths(&g, 10_000, seed).iter().map(|p| p.values()[64].powi(2)).collect();
                let (mean, se) = mean_se(&sq);
                assert!((mean - 1.0).abs() < 4.0 * se, "{h} {method:?}: {mean} ± {se}");
            }
        }
    }

    #[test]
    fn increments_are_stationary() {
        let g = FbmGenerator::new(0.3, 5).unwrap();
        let paths = mc_paths(&g, 4000, 9);
        let target = (-0.6f64 * 5.0).exp2();
        for k in [0usize, 7, 31] {
            let sq: Vec<f64> = paths.iter().map(|p| (p.values()[k + 1] - p.values()[k]).powi(2)).collect();
            let (mean, se) = mean_se(&sq);
            assert!((mean - target).abs() < 4.0 * se, "k={k}: {mean} vs {target}");
        }
    }

    #[test]
    fn weighted_quadratic_variation_converges() {
        let n = 14u32;
        for &h in &[0.3, 0.7] {
            let g = FbmGenerator::new(h, n).unwrap();
            let avg: f64 = mc_paths(&g, 100, 5)
                .iter()
                .map(|p| ((2.0 * h - 1.0) * n as f64).exp2() * p_variation(p, 2.0, n).unwrap())
                .sum::<f64>()
                / 100.0;
            assert!((avg - 1.0).abs() < 0.1, "H={h}: {avg}");
        }
    }
}
