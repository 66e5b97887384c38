//! Gaussian theory for fBM inputs: the covariance kernel `g_H` of the
//! z-vectors, the block operator `Q_n`, the error vector
//! `w_n = ϑ̄_n - θ̄_n = Q_n z_{n+2}`, and the limiting constants.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, level_error, Result};
use crate::estimators::vartheta_coeffs;
use crate::faber_schauder::theta_generation;
use crate::generators::fbm::check_hurst;
use crate::grid::SampledPath;
use crate::numeric::l2_norm;

/// Largest `n` for which dense `2^n x 2^n` matrices are built.
pub const MAX_DENSE_LEVEL: u32 = 8;

/// Lags at or above this use the asymptotic series for `g_H`.
const SERIES_LAG: u64 = 24;
const SERIES_TERMS: usize = 40;

/// Summands of `g_H(ς) = h1 + h2 + h3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhComponents {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

impl GhComponents {
    pub fn total(&self) -> f64 {
        self.h1 + self.h2 + self.h3
    }
}

/// The three summands evaluated from their closed forms.
pub fn gh_components(lag: u64, hurst: f64) -> Result<GhComponents> {
    check_hurst(hurst)?;
    let s = lag as f64;
    let a = 2.0 * hurst;
    let h1 = -2.0 * (2.0 * s.powf(a) + (s - 1.0).abs().powf(a) + (s + 1.0).powf(a));
    let h2 = if lag == 0 {
        16.0 / (a + 1.0)
    } else {
        8.0 / (a + 1.0) * ((s + 1.0).powf(a + 1.0) - (s - 1.0).powf(a + 1.0))
    };
    let h3 = -8.0 / ((a + 2.0) * (a + 1.0))
        * ((s + 1.0).powf(a + 2.0) - 2.0 * s.powf(a + 2.0) + (s - 1.0).abs().powf(a + 2.0));
    Ok(GhComponents { h1, h2, h3 })
}

fn binomials(a: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut b = 1.0;
    for j in 0..count {
        out.push(b);
        b *= (a - j as f64) / (j as f64 + 1.0);
    }
    out
}

/// `g_H(ς)` for large lags as `ς^{2H} sum_p c_p ς^{-p}` (even `p >= 4`),
/// obtained by expanding each `(ς ± 1)^e` binomially. The leading terms
/// cancel exactly, which the closed form cannot do in floating point.
fn g_h_series(lag: u64, hurst: f64) -> f64 {
    let s = lag as f64;
    let a = 2.0 * hurst;
    let b0 = binomials(a, SERIES_TERMS + 3);
    let b1 = binomials(a + 1.0, SERIES_TERMS + 3);
    let b2 = binomials(a + 2.0, SERIES_TERMS + 3);
    let inv = 1.0 / (s * s);
    let mut pow = inv * inv;
    let mut acc = 0.0;
    for p in (4..SERIES_TERMS).step_by(2) {
        let c = -4.0 * b0[p] + 16.0 / (a + 1.0) * b1[p + 1] - 16.0 / ((a + 1.0) * (a + 2.0)) * b2[p + 2];
        acc += c * pow;
        pow *= inv;
    }
    s.powf(a) * acc
}

/// `g_H(ς) = h1(ς) + h2(ς) + h3(ς)`.
pub fn g_h(lag: u64, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    if lag >= SERIES_LAG {
        return Ok(g_h_series(lag, hurst));
    }
    Ok(gh_components(lag, hurst)?.total())
}

/// `g_H` and its summands on lags `0..=max_lag`.
#[derive(Clone, Debug, PartialEq)]
pub struct GhTable {
    pub hurst: f64,
    pub values: Vec<f64>,
    pub components: Vec<GhComponents>,
}

impl GhTable {
    pub fn new(hurst: f64, max_lag: u64) -> Result<Self> {
        let components = (0..=max_lag)
            .map(|s| gh_components(s, hurst))
            .collect::<Result<Vec<_>>>()?;
        let values = (0..=max_lag).map(|s| g_h(s, hurst)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            hurst,
            values,
            components,
        })
    }

    pub fn get(&self, lag: usize) -> Option<f64> {
        self.values.get(lag).copied()
    }
}

/// `G_n`, `Γ_n = 2^{(1-2H)n} G_n` and `Φ_n = Q_n Γ_{n+2} Q_n^T`.
#[derive(Clone, Debug)]
pub struct CovarianceMatrices {
    pub n: u32,
    pub hurst: f64,
    pub gram: DMatrix<f64>,
    pub gamma: DMatrix<f64>,
    pub phi: DMatrix<f64>,
}

fn toeplitz(size: usize, row: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |i, j| row[i.abs_diff(j)])
}

/// Dense covariance matrices for `n <= 8`.
pub fn gamma_matrix(n: u32, hurst: f64) -> Result<CovarianceMatrices> {
    check_hurst(hurst)?;
    if n > MAX_DENSE_LEVEL {
        return Err(level_error(n as i64, format!("dense matrices are limited to n <= {MAX_DENSE_LEVEL}")));
    }
    let size = 1usize << n;
    let wide = size << 2;
    let g: Vec<f64> = (0..wide as u64).map(|s| g_h(s, hurst)).collect::<Result<_>>()?;
    let gram = toeplitz(size, &g);
    let gamma = &gram * ((1.0 - 2.0 * hurst) * n as f64).exp2();
    let gamma_wide = toeplitz(wide, &g) * ((1.0 - 2.0 * hurst) * (n + 2) as f64).exp2();
    let mut phi = DMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..=i {
            let mut acc = 0.0;
            for (a, ra) in R.iter().enumerate() {
                for (b, rb) in R.iter().enumerate() {
                    acc += ra * rb * gamma_wide[(4 * i + a, 4 * j + b)];
                }
            }
            phi[(i, j)] = acc;
            phi[(j, i)] = acc;
        }
    }
    Ok(CovarianceMatrices {
        n,
        hurst,
        gram,
        gamma,
        phi,
    })
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    (eig.min(), eig.max())
}

/// Entries of `z_{(n,k)}` as a sparse combination of `x(j 2^{-(n+k+1)})`.
#[derive(Clone, Debug, PartialEq)]
pub struct XiCoeffs {
    /// Grid level `n + k + 1` the indices refer to.
    pub level: u32,
    /// First index of the nonzero block.
    pub offset: usize,
    pub values: Vec<f64>,
}

impl XiCoeffs {
    pub fn get(&self, j: usize) -> f64 {
        j.checked_sub(self.offset)
            .and_then(|d| self.values.get(d))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `sum_j ξ_j x(j 2^{-level})`; `x` may be on any grid of level >= `self.level`.
    pub fn apply(&self, x: &SampledPath) -> Result<f64> {
        if x.level() < self.level {
            return Err(level_error(x.level() as i64, format!("ξ coefficients need level {}", self.level)));
        }
        let stride = 1usize << (x.level() - self.level);
        let v = x.values();
        Ok(self
            .values
            .iter()
            .enumerate()
            .map(|(d, c)| c * v[(self.offset + d) * stride])
            .sum())
    }
}

/// Coefficients with `z^{(n,k)}_i = sum_j ξ_j x(j 2^{-(n+k+1)})`, `1 <= i <= 2^n`:
/// `2^{n/2}(2^{-k} - 2)` at `j = 2^{k+1}(i-1)` and `j = 2^{k+1} i`,
/// `2^{1-k+n/2}` strictly between, zero elsewhere.
pub fn xi_coeffs(n: u32, k: u32, i: usize) -> Result<XiCoeffs> {
    if n + k + 1 > crate::grid::MAX_GRID_LEVEL {
        return Err(level_error((n + k + 1) as i64, "ξ coefficient grid too fine"));
    }
    if i == 0 || i > 1usize << n {
        return Err(invalid(format!("block index {i} outside 1..=2^{n}")));
    }
    let width = 1usize << (k + 1);
    let edge = (0.5 * n as f64).exp2() * ((-(k as f64)).exp2() - 2.0);
    let inner = (1.0 - k as f64 + 0.5 * n as f64).exp2();
    let mut values = vec![inner; width + 1];
    values[0] = edge;
    values[width] = edge;
    Ok(XiCoeffs {
        level: n + k + 1,
        offset: width * (i - 1),
        values,
    })
}

/// `z_{(n,k)}` computed through the ξ representation.
pub fn z_truncated_via_xi(x: &SampledPath, n: u32, k: u32) -> Result<Vec<f64>> {
    (1..=1usize << n).map(|i| xi_coeffs(n, k, i)?.apply(x)).collect()
}

/// `z^{(n,k)}_i = 2^{3n/2} sum_{m=n}^{n+k} 2^{-3m/2} sum_j θ_{m, j + 2^{m-n}(i-1)}`,
/// from the Faber–Schauder coefficients of `x`; needs `x.level() >= n+k+1`.
pub fn z_truncated(x: &SampledPath, n: u32, k: u32) -> Result<Vec<f64>> {
    if x.level() < n + k + 1 {
        return Err(level_error(
            x.level() as i64,
            format!("z_(n={n},k={k}) needs samples on level {}", n + k + 1),
        ));
    }
    let size = 1usize << n;
    let mut z = vec![0.0; size];
    for m in n..=n + k {
        let theta = theta_generation(x, m);
        let weight = (1.5 * (n as f64 - m as f64)).exp2();
        let block = 1usize << (m - n);
        for (zi, chunk) in z.iter_mut().zip(theta.chunks(block)) {
            *zi += weight * chunk.iter().sum::<f64>();
        }
    }
    Ok(z)
}

/// Row block `r = (-1, 1, 1, -1) / 4` of `Q_n`.
pub const R: [f64; 4] = [-0.25, 0.25, 0.25, -0.25];

/// `Q_n z` for `z` of length `2^{n+2}`, blockwise, without forming `Q_n`.
pub fn q_apply(z: &[f64]) -> Result<Vec<f64>> {
    if z.len() < 4 || !z.len().is_multiple_of(4) || !(z.len() / 4).is_power_of_two() {
        return Err(invalid(format!("q_apply needs length 4 * 2^n, got {}", z.len())));
    }
    Ok(z.chunks(4).map(|c| R.iter().zip(c).map(|(r, v)| r * v).sum()).collect())
}

/// Dense `Q_n` (`2^n x 2^{n+2}`), `n <= 8`.
pub fn q_matrix(n: u32) -> Result<DMatrix<f64>> {
    if n > MAX_DENSE_LEVEL {
        return Err(level_error(n as i64, format!("dense matrices are limited to n <= {MAX_DENSE_LEVEL}")));
    }
    let rows = 1usize << n;
    Ok(DMatrix::from_fn(rows, rows * 4, |i, j| if j / 4 == i { R[j % 4] } else { 0.0 }))
}

/// Operator 2-norm by power iteration on `A^T A`.
pub fn spectral_norm(a: &DMatrix<f64>, iterations: usize) -> f64 {
    let ata = a.transpose() * a;
    // deterministic start; an affine sequence would lie in the kernel of Q_n
    let mut v = DVector::from_fn(ata.nrows(), |i, _| (1.7 * i as f64 + 0.3).sin() + 1.5);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let next = &ata * &v;
        lambda = next.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        v = next / lambda;
    }
    lambda.sqrt()
}

/// `w_n = ϑ̄_n(y) - θ̄_n(x)`: the error of the coefficients read off the
/// antiderivative. Equals `Q_n z_{n+2}` where `z_{n+2}` is the full series;
/// on finite data it matches `Q_n z_{(n+2,k)}` for the deepest available `k`
/// when `y` integrates the piecewise-linear interpolant of `x` exactly.
pub fn w_error(x: &SampledPath, y: &SampledPath, n: u32) -> Result<Vec<f64>> {
    if x.level() < n + 1 {
        return Err(level_error(x.level() as i64, format!("θ̄_{n} needs level {}", n + 1)));
    }
    let vartheta = vartheta_coeffs(y, n)?;
    let theta = theta_generation(x, n);
    Ok(vartheta.values().iter().zip(&theta).map(|(a, b)| a - b).collect())
}

/// Limits of normalized norms for fBM with Hurst parameter `H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticConstants {
    pub hurst: f64,
    /// `lim 2^{(2H-2)n} ||θ̄_n||^2 = 2^{2-2H} - 1`.
    pub theta_norm_sq_limit: f64,
    /// `lim 2^{n(H-1)} ||z_n|| = 2 sqrt((1-H)/(1+H))`.
    pub z_norm_limit: f64,
    /// `g(0) - g(1)/2 - g(2) + g(3)/2`.
    pub alpha: f64,
    /// `2^{2+2H} - 2^{4H}`.
    pub beta: f64,
    /// `lim 2^{n(H-1)} ||w_n|| = 2^{-2H} sqrt(α)`.
    pub w_norm_limit: f64,
    /// `lim ||w_n|| / ||θ̄_n|| = sqrt(α/β)`.
    pub ratio: f64,
}

pub fn alpha(hurst: f64) -> Result<f64> {
    let g = |s| g_h(s, hurst);
    Ok(g(0)? - 0.5 * g(1)? - g(2)? + 0.5 * g(3)?)
}

pub fn beta(hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    Ok((2.0 + 2.0 * hurst).exp2() - (4.0 * hurst).exp2())
}

pub fn asymptotic_constants(hurst: f64) -> Result<AsymptoticConstants> {
    let alpha = alpha(hurst)?;
    let beta = beta(hurst)?;
    Ok(AsymptoticConstants {
        hurst,
        theta_norm_sq_limit: (2.0 - 2.0 * hurst).exp2() - 1.0,
        z_norm_limit: 2.0 * ((1.0 - hurst) / (1.0 + hurst)).sqrt(),
        alpha,
        beta,
        w_norm_limit: (-2.0 * hurst).exp2() * alpha.sqrt(),
        ratio: (alpha / beta).sqrt(),
    })
}

/// `start, start+step, ..., <= stop` (with a small tolerance on the endpoint).
pub fn hurst_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || stop.is_nan() || start.is_nan() || stop < start {
        return Err(invalid(format!("bad grid {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub fn alpha_beta_table(hursts: &[f64]) -> Result<Vec<AsymptoticConstants>> {
    hursts.iter().map(|&h| asymptotic_constants(h)).collect()
}

/// CSV with columns `H,alpha,beta,ratio`.
pub fn write_alpha_beta_csv<W: Write>(rows: &[AsymptoticConstants], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["H", "alpha", "beta", "ratio"])?;
    for r in rows {
        w.write_record([r.hurst, r.alpha, r.beta, r.ratio].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Summary of `||w_n|| / ||θ̄_n||` over a sample of paths at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionWRow {
    pub n: u32,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// `sqrt(α(H)/β(H))` when a Hurst parameter was given.
    pub limit: Option<f64>,
}

/// Empirical ratios `||w_n|| / ||θ̄_n||` for each `(x, y)` pair and level.
/// This is a report; a finite sample cannot certify that the ratio converges.
pub fn condition_w_diagnostic(
    samples: &[(SampledPath, SampledPath)],
    levels: std::ops::RangeInclusive<u32>,
    hurst: Option<f64>,
) -> Result<Vec<ConditionWRow>> {
    if samples.is_empty() {
        return Err(invalid("condition (W) diagnostic needs at least one sample"));
    }
    let limit = hurst.map(|h| asymptotic_constants(h).map(|c| c.ratio)).transpose()?;
    levels
        .map(|n| {
            let ratios = samples
                .iter()
                .map(|(x, y)| {
                    let w = w_error(x, y, n)?;
                    Ok(l2_norm(&w) / l2_norm(&theta_generation(x, n)))
                })
                .collect::<Result<Vec<f64>>>()?;
            let count = ratios.len();
            let mean = ratios.iter().sum::<f64>() / count as f64;
            let std = if count > 1 {
                (ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
            } else {
                0.0
            };
            Ok(ConditionWRow {
                n,
                count,
                mean,
                std,
                min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                limit,
            })
        })
        .collect()
}
