//! Roughness estimators.
//!
//! * [`rhat_star`] works on direct observations of `x` through its
//!   generation-`n` Faber–Schauder coefficients.
//! * [`rhat`] works on observations of the antiderivative `y` on `T_{n+2}`
//!   through the five-point coefficients [`vartheta_coeffs`].
//! * [`spline_gen_coeffs`] and [`spline_final_gen_coeffs`] are the
//!   Faber–Schauder coefficients of the derivative of the quadratic spline
//!   interpolating `y` on `T_{n+2}`; only the final generation depends on the
//!   initial slope `x0_hat`, and [`rtilde`] shows how badly that behaves.
//!
//! All estimators share the form `1 - log2(||v||) / n`.

use crate::error::{invalid, level_error, Result, RoughnessError};
use crate::faber_schauder::theta_generation;
use crate::grid::SampledPath;
use crate::numeric::{l2_norm, pairwise_sum, CompensatedSum};

/// `(vartheta_{n,0}, ..., vartheta_{n,2^n-1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarthetaVector {
    n: u32,
    values: Vec<f64>,
}

impl VarthetaVector {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.values)
    }
}

fn require_level(path: &SampledPath, needed: u32, what: &str) -> Result<()> {
    if path.level() < needed {
        return Err(level_error(
            needed as i64,
            format!("{what} needs a path of level >= {needed}, got {}", path.level()),
        ));
    }
    Ok(())
}

/// `1 - log2(norm) / n`, rejecting zero norms.
pub fn roughness_from_norm(norm: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(invalid("estimator level n must be at least 1"));
    }
    if norm <= 0.0 || !norm.is_finite() {
        return Err(RoughnessError::Degenerate(format!(
            "coefficient vector at level {n} has norm {norm}"
        )));
    }
    Ok(1.0 - norm.log2() / n as f64)
}

/// Dyadic `p`-th variation `sum_k |x((k+1)2^-n) - x(k 2^-n)|^p`.
pub fn p_variation(x: &SampledPath, p: f64, n: u32) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("variation exponent {p} must be >= 1")));
    }
    require_level(x, n, "p-variation")?;
    let coarse = x.restrict(n)?;
    let terms: Vec<f64> = coarse
        .values()
        .windows(2)
        .map(|w| (w[1] - w[0]).abs().powf(p))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `1 - log2 ||theta_n|| / n` from direct observations of `x` on `T_{n+1}`.
pub fn rhat_star(x: &SampledPath, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(invalid("estimator level n must be at least 1"));
    }
    require_level(x, n + 1, "rhat_star")?;
    let theta = theta_generation(x, n);
    roughness_from_norm(l2_norm(&theta), n)
}

/// Five-point coefficients
/// `2^{3n/2+3} (y(4k h) - 2y((4k+1)h) + 2y((4k+3)h) - y((4k+4)h))`, `h = 2^{-n-2}`.
pub fn vartheta_coeffs(y: &SampledPath, n: u32) -> Result<VarthetaVector> {
    require_level(y, n + 2, "vartheta")?;
    let v = y.values();
    let stride = 1usize << (y.level() - n - 2);
    let scale = (1.5 * n as f64 + 3.0).exp2();
    let values = (0..1usize << n)
        .map(|k| {
            let at = |i: usize| v[(4 * k + i) * stride];
            // affine parts cancel pairwise: (y0 - y4) + 2 (y3 - y1)
            scale * ((at(0) - at(4)) + 2.0 * (at(3) - at(1)))
        })
        .collect();
    Ok(VarthetaVector { n, values })
}

/// `1 - log2 ||vartheta_n|| / n` from observations of `y` on `T_{n+2}`.
pub fn rhat(y: &SampledPath, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(invalid("estimator level n must be at least 1"));
    }
    roughness_from_norm(vartheta_coeffs(y, n)?.norm(), n)
}

/// `(k, rhat_k)` for every `k` in `levels`.
pub fn rhat_series(y: &SampledPath, levels: std::ops::RangeInclusive<u32>) -> Result<Vec<(u32, f64)>> {
    levels.map(|k| rhat(y, k).map(|r| (k, r))).collect()
}

/// Generation-`m` (`m <= n`) spline-derivative coefficients
/// `2^{n+m/2+3} sum_{j=1}^{2^{n+1-m}} (-1)^j (...)`, summed pairwise.
///
/// Each coefficient only reads `y` on the support of `e_{m,k}`; for `m == n`
/// this equals [`vartheta_coeffs`].
pub fn spline_gen_coeffs(y: &SampledPath, n: u32, m: u32) -> Result<Vec<f64>> {
    if m > n {
        return Err(invalid(format!(
            "generation {m} exceeds {n}; use spline_final_gen_coeffs for generation n+1"
        )));
    }
    require_level(y, n + 2, "spline coefficients")?;
    let fine = y.restrict(n + 2)?;
    let v = fine.values();
    let width = 1usize << (n + 2 - m);
    let steps = 1usize << (n + 1 - m);
    let scale = (n as f64 + 0.5 * m as f64 + 3.0).exp2();
    let mut terms = Vec::with_capacity(steps);
    let out = (0..1usize << m)
        .map(|k| {
            let (a, b) = (k * width, (k + 1) * width);
            terms.clear();
            terms.extend((1..=steps).map(|j| {
                let t = (v[a + j] - v[a + j - 1]) + (v[b - j + 1] - v[b - j]);
                if j % 2 == 1 {
                    -t
                } else {
                    t
                }
            }));
            scale * pairwise_sum(&terms)
        })
        .collect();
    Ok(out)
}

/// Final-generation (`n+1`) spline-derivative coefficients. These carry the
/// additive term `-2^{(n+1)/2+2} x0_hat` and a prefix alternating sum that
/// makes them depend on all data to their left. The sum is empty for `k = 0`.
pub fn spline_final_gen_coeffs(y: &SampledPath, n: u32, x0_hat: f64) -> Result<Vec<f64>> {
    require_level(y, n + 2, "spline coefficients")?;
    let fine = y.restrict(n + 2)?;
    let v = fine.values();
    let big = 1.5 * (n as f64 + 1.0);
    let c_x0 = (0.5 * (n as f64 + 1.0) + 2.0).exp2();
    let c_prefix = (big + 4.0).exp2();
    let c_local = (big + 2.0).exp2();
    let count = 1usize << (n + 1);
    let mut out = Vec::with_capacity(count);
    // running (-1)^j increments for j = 1..=2k, in pairs so each step adds
    // (y(2i) - y(2i-1)) - (y(2i-1) - y(2i-2))
    let mut prefix = CompensatedSum::default();
    for k in 0..count {
        let d_left = v[2 * k + 1] - v[2 * k];
        let d_right = v[2 * k + 2] - v[2 * k + 1];
        out.push(-c_x0 * x0_hat - c_prefix * prefix.value() + 3.0 * c_local * d_left - c_local * d_right);
        prefix.add(d_right - d_left);
    }
    Ok(out)
}

/// `1 - log2 ||theta_hat_{n+1}|| / (n+1)`.
pub fn rtilde(y: &SampledPath, n: u32, x0_hat: f64) -> Result<f64> {
    let coeffs = spline_final_gen_coeffs(y, n, x0_hat)?;
    roughness_from_norm(l2_norm(&coeffs), n + 1)
}
