//! Sequential scale estimator.
//!
//! Scaling `y` by `λ` shifts every estimate: `R̂_k(λy) = R̂_k(y) - u/k` with
//! `u = log2|λ|`. The sequential scaling factor minimizes
//!
//! ```text
//! sum_{k=n-m}^{n} α_{n-k} (R̂_k(λy) - R̂_{k-1}(λy))^2
//!   = sum α_{n-k} (d_k + u / (k(k-1)))^2,    d_k = R̂_k(y) - R̂_{k-1}(y),
//! ```
//!
//! a strictly convex quadratic in `u` with minimizer
//! `u* = -(sum α d_k / (k(k-1))) / c`, `c = sum α / (k(k-1))^2`.
//! The estimate is `R^s_n = R̂_n(y) - u*/n`, which is invariant under `y → λy`.
//! It is also an affine combination of `R̂_{n-m-1}, ..., R̂_n` with weights
//! from [`beta_weights`].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::estimators::rhat;
use crate::grid::SampledPath;

/// Window length `m` and weights `α_0..=α_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScaleConfig", into = "RawScaleConfig")]
pub struct ScaleConfig {
    window: usize,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawScaleConfig {
    m: usize,
    alpha: Vec<f64>,
}

impl TryFrom<RawScaleConfig> for ScaleConfig {
    type Error = crate::error::RoughnessError;

    fn try_from(raw: RawScaleConfig) -> Result<Self> {
        ScaleConfig::new(raw.m, raw.alpha)
    }
}

impl From<ScaleConfig> for RawScaleConfig {
    fn from(cfg: ScaleConfig) -> Self {
        RawScaleConfig {
            m: cfg.window,
            alpha: cfg.weights,
        }
    }
}

impl ScaleConfig {
    pub fn new(window: usize, weights: Vec<f64>) -> Result<Self> {
        if window == 0 {
            return Err(invalid("scale window m must be at least 1"));
        }
        if weights.len() != window + 1 {
            return Err(invalid(format!(
                "expected {} weights for window {window}, got {}",
                window + 1,
                weights.len()
            )));
        }
        if weights.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(invalid("scale weights must be finite and nonnegative"));
        }
        if weights[0] <= 0.0 {
            return Err(invalid("weight α_0 must be positive"));
        }
        Ok(Self { window, weights })
    }

    /// `m` equal unit weights.
    pub fn uniform(window: usize) -> Result<Self> {
        Self::new(window, vec![1.0; window + 1])
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Smallest `n` this configuration accepts (`n > m + 1`).
    pub fn min_level(&self) -> u32 {
        self.window as u32 + 2
    }

    /// First level whose estimate enters the window, `n - m - 1`.
    pub fn first_level(&self, n: u32) -> u32 {
        n - self.window as u32 - 1
    }

    fn check_level(&self, n: u32) -> Result<()> {
        if n < self.min_level() {
            return Err(invalid(format!(
                "sequential scaling with m = {} needs n >= {}, got {n}",
                self.window,
                self.min_level()
            )));
        }
        Ok(())
    }
}

impl Default for ScaleConfig {
    /// `m = 3`, `α = (1, 1, 1, 1)`.
    fn default() -> Self {
        Self::uniform(3).expect("valid default")
    }
}

/// Output of [`seq_scale_estimate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleResult {
    pub n: u32,
    pub lambda_s: f64,
    /// `log2 λ^s_n`.
    pub log2_lambda: f64,
    pub r_s: f64,
    /// `R̂_{n-m-1}(y), ..., R̂_n(y)` of the unscaled input.
    pub rhat_series: Vec<f64>,
    /// `β_{n,n-m-1}, ..., β_{n,n}`, aligned with `rhat_series`.
    pub beta: Vec<f64>,
    pub c_s: f64,
}

impl ScaleResult {
    /// Levels `n-m-1..=n` that `rhat_series` and `beta` refer to.
    pub fn levels(&self) -> std::ops::RangeInclusive<u32> {
        (self.n + 1 - self.rhat_series.len() as u32)..=self.n
    }
}

/// `c^s_n = sum_{k=n-m}^{n} α_{n-k} / (k^2 (k-1)^2)`.
pub fn normalizer(n: u32, cfg: &ScaleConfig) -> Result<f64> {
    cfg.check_level(n)?;
    Ok(window_levels(n, cfg)
        .map(|(k, a)| a / (k * k * (k - 1.0) * (k - 1.0)))
        .sum())
}

fn window_levels(n: u32, cfg: &ScaleConfig) -> impl Iterator<Item = (f64, f64)> + '_ {
    (0..=cfg.window).map(move |i| ((n as usize - i) as f64, cfg.weights[i]))
}

/// Minimizer `u* = log2 λ^s_n` given `R̂_{n-m-1}, ..., R̂_n`.
pub fn optimal_log_scale(rhat_window: &[f64], n: u32, cfg: &ScaleConfig) -> Result<f64> {
    cfg.check_level(n)?;
    if rhat_window.len() != cfg.window + 2 {
        return Err(invalid(format!(
            "expected {} estimates, got {}",
            cfg.window + 2,
            rhat_window.len()
        )));
    }
    let last = rhat_window.len() - 1;
    let mut num = 0.0;
    for (i, (k, a)) in window_levels(n, cfg).enumerate() {
        // rhat_window[last - i] is R̂_k with k = n - i
        let d = rhat_window[last - i] - rhat_window[last - i - 1];
        num += a * d / (k * (k - 1.0));
    }
    Ok(-num / normalizer(n, cfg)?)
}

/// Objective value at `u = log2 λ`; exposed for brute-force checks.
pub fn scale_objective(rhat_window: &[f64], n: u32, cfg: &ScaleConfig, u: f64) -> f64 {
    let last = rhat_window.len() - 1;
    window_levels(n, cfg)
        .enumerate()
        .map(|(i, (k, a))| {
            let d = rhat_window[last - i] - rhat_window[last - i - 1];
            let shifted = d + u / (k * (k - 1.0));
            a * shifted * shifted
        })
        .sum()
}

fn rhat_window(y: &SampledPath, n: u32, cfg: &ScaleConfig) -> Result<Vec<f64>> {
    cfg.check_level(n)?;
    (cfg.first_level(n)..=n).map(|k| rhat(y, k)).collect()
}

/// Sequential scaling factor `λ^s_n > 0`.
pub fn seq_scale_factor(y: &SampledPath, n: u32, cfg: &ScaleConfig) -> Result<f64> {
    let window = rhat_window(y, n, cfg)?;
    Ok(optimal_log_scale(&window, n, cfg)?.exp2())
}

/// Sequential scale estimate from precomputed `R̂_{n-m-1}, ..., R̂_n`.
pub fn seq_scale_from_series(rhat_window: &[f64], n: u32, cfg: &ScaleConfig) -> Result<ScaleResult> {
    let u = optimal_log_scale(rhat_window, n, cfg)?;
    Ok(ScaleResult {
        n,
        lambda_s: u.exp2(),
        log2_lambda: u,
        r_s: rhat_window[rhat_window.len() - 1] - u / n as f64,
        rhat_series: rhat_window.to_vec(),
        beta: beta_weights(n, cfg)?,
        c_s: normalizer(n, cfg)?,
    })
}

/// `R^s_n(y) = R̂_n(λ^s_n y)`, with all intermediate quantities.
pub fn seq_scale_estimate(y: &SampledPath, n: u32, cfg: &ScaleConfig) -> Result<ScaleResult> {
    let window = rhat_window(y, n, cfg)?;
    seq_scale_from_series(&window, n, cfg)
}

/// Weights `β_{n,k}`, `k = n-m-1..=n` (returned in increasing `k`), of the
/// representation `R^s_n = sum_k β_{n,k} R̂_k`:
///
/// ```text
/// β_{n,n}     = 1 + α_0 / (c n^2 (n-1))
/// β_{n,k}     = (α_{n-k}/(k-1) - α_{n-k-1}/(k+1)) / (c n k),   n-m <= k <= n-1
/// β_{n,n-m-1} = -α_m / (c n (n-m) (n-m-1))
/// ```
pub fn beta_weights(n: u32, cfg: &ScaleConfig) -> Result<Vec<f64>> {
    let c = normalizer(n, cfg)?;
    let nf = n as f64;
    let m = cfg.window;
    let a = cfg.weights();
    let mut beta = Vec::with_capacity(m + 2);
    let lowest = (n as usize - m) as f64;
    beta.push(-a[m] / (c * nf * lowest * (lowest - 1.0)));
    for k in (n as usize - m)..(n as usize) {
        let kf = k as f64;
        let i = n as usize - k;
        beta.push((a[i] / (kf - 1.0) - a[i - 1] / (kf + 1.0)) / (c * nf * kf));
    }
    beta.push(1.0 + a[0] / (c * nf * nf * (nf - 1.0)));
    Ok(beta)
}
