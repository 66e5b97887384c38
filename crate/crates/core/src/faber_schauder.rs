//! Faber–Schauder analysis and synthesis on dyadic grids.
//!
//! With `e_{-1,0}(t) = t`, `e_{0,0}(t) = min(t, 1-t)^+` and
//! `e_{m,k}(t) = 2^{-m/2} e_{0,0}(2^m t - k)`, the piecewise-linear
//! interpolation of `x` on `T_n` is
//!
//! ```text
//! x_n = x(0) + (x(1) - x(0)) e_{-1,0} + sum_{m<n} sum_k theta_{m,k} e_{m,k}
//! ```
//!
//! with `theta_{m,k} = 2^{m/2} (2 x((2k+1) 2^{-m-1}) - x(k 2^{-m}) - x((k+1) 2^{-m}))`.
//! Coefficients are stored generation by generation.

use std::io::Write;

use crate::error::{invalid, level_error, Result};
use crate::grid::{grid_len, SampledPath, MAX_GRID_LEVEL};
use crate::numeric::prefix_sums;

/// Faber–Schauder coefficients of generations `0..depth`, plus `x(0)` and
/// the slope `theta_{-1,0} = x(1) - x(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaberSchauderCoeffs {
    x0: f64,
    slope: f64,
    theta: Vec<Vec<f64>>,
}

impl FaberSchauderCoeffs {
    pub fn new(x0: f64, slope: f64, theta: Vec<Vec<f64>>) -> Result<Self> {
        for (m, gen) in theta.iter().enumerate() {
            if gen.len() != 1usize << m {
                return Err(invalid(format!(
                    "generation {m} has {} coefficients, expected {}",
                    gen.len(),
                    1usize << m
                )));
            }
        }
        Ok(Self { x0, slope, theta })
    }

    /// All-zero coefficients of the given depth.
    pub fn zeros(depth: u32) -> Self {
        Self {
            x0: 0.0,
            slope: 0.0,
            theta: (0..depth).map(|m| vec![0.0; 1usize << m]).collect(),
        }
    }

    /// Coefficients with `theta_{m,k} = f(m, k)` for `m < depth`.
    pub fn from_fn(x0: f64, slope: f64, depth: u32, f: impl Fn(u32, usize) -> f64) -> Self {
        let theta = (0..depth)
            .map(|m| (0..1usize << m).map(|k| f(m, k)).collect())
            .collect();
        Self { x0, slope, theta }
    }

    pub fn depth(&self) -> u32 {
        self.theta.len() as u32
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn generation(&self, m: u32) -> &[f64] {
        &self.theta[m as usize]
    }

    pub fn generation_mut(&mut self, m: u32) -> &mut [f64] {
        &mut self.theta[m as usize]
    }

    pub fn generations(&self) -> &[Vec<f64>] {
        &self.theta
    }

    /// Writes `m,k,theta` rows; the linear part is emitted as `m = -1`
    /// (slope) preceded by a row `x0` with empty `k`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["m", "k", "theta"])?;
        w.write_record(["x0", "", &self.x0.to_string()])?;
        w.write_record(["-1", "0", &self.slope.to_string()])?;
        for (m, gen) in self.theta.iter().enumerate() {
            for (k, v) in gen.iter().enumerate() {
                w.write_record([m.to_string(), k.to_string(), v.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Coefficient `theta_{m,k}` read off a path of level `> m`.
pub(crate) fn theta_at(values: &[f64], level: u32, m: u32, k: usize) -> f64 {
    let stride = 1usize << (level - m);
    let left = k * stride;
    let scale = (0.5 * m as f64).exp2();
    scale * (2.0 * values[left + stride / 2] - values[left] - values[left + stride])
}

/// Generation-`m` coefficient vector of a path of level `> m`.
pub(crate) fn theta_generation(path: &SampledPath, m: u32) -> Vec<f64> {
    (0..1usize << m)
        .map(|k| theta_at(path.values(), path.level(), m, k))
        .collect()
}

/// Faber–Schauder coefficients of generations `0..path.level()`.
pub fn analyze(path: &SampledPath) -> Result<FaberSchauderCoeffs> {
    let level = path.level();
    if level == 0 {
        return Err(level_error(0, "analysis needs at least one interior grid point"));
    }
    let v = path.values();
    let theta = (0..level).map(|m| theta_generation(path, m)).collect();
    Ok(FaberSchauderCoeffs {
        x0: v[0],
        slope: v[v.len() - 1] - v[0],
        theta,
    })
}

/// Evaluates the truncated expansion on `T_out_level` by midpoint refinement.
pub fn synthesize(coeffs: &FaberSchauderCoeffs, out_level: u32) -> Result<SampledPath> {
    if out_level < coeffs.depth() {
        return Err(level_error(
            out_level as i64,
            format!("output level below coefficient depth {}", coeffs.depth()),
        ));
    }
    if out_level > MAX_GRID_LEVEL {
        return Err(level_error(out_level as i64, "exceeds maximum grid level"));
    }
    let mut values = vec![coeffs.x0, coeffs.x0 + coeffs.slope];
    for m in 0..out_level {
        let gen = coeffs.theta.get(m as usize);
        // peak height of e_{m,k}
        let peak = 0.5 * (-0.5 * m as f64).exp2();
        let mut next = Vec::with_capacity(grid_len(m + 1));
        for k in 0..values.len() - 1 {
            let bump = gen.map_or(0.0, |g| g[k] * peak);
            next.push(values[k]);
            next.push(0.5 * (values[k] + values[k + 1]) + bump);
        }
        next.push(values[values.len() - 1]);
        values = next;
    }
    SampledPath::new(out_level, values)
}

fn check_takagi_exponent(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(invalid(format!("Takagi–Landsberg exponent {r} not in (0, 1]")));
    }
    Ok(())
}

/// Takagi–Landsberg coefficients `theta_{m,k} = 2^{m(1/2 - R)}`, `m < depth`.
pub fn takagi_coeffs(r: f64, depth: u32) -> Result<FaberSchauderCoeffs> {
    check_takagi_exponent(r)?;
    Ok(FaberSchauderCoeffs::from_fn(0.0, 0.0, depth, |m, _| {
        (m as f64 * (0.5 - r)).exp2()
    }))
}

/// Takagi–Landsberg function truncated at `depth` generations, sampled on
/// `T_out_level`. With `depth == out_level` the samples equal those of the
/// full series, since `e_{m,k}` vanishes on `T_out_level` for `m >= out_level`.
pub fn takagi_landsberg(r: f64, depth: u32, out_level: u32) -> Result<SampledPath> {
    let coeffs = takagi_coeffs(r, depth)?;
    Ok(synthesize(&coeffs, out_level)?.with_label(format!("takagi R={r} depth={depth}")))
}

/// Exact antiderivative `y^R(t) = ∫_0^t x^R(s) ds` of the full Takagi–Landsberg
/// series on `T_out_level`.
///
/// Generations below `out_level` form a piecewise-linear function on the
/// grid, integrated exactly cell by cell. Every generation `m >= out_level`
/// wavelet sits inside a single cell and integrates to `2^{-3m/2-2}`, so each
/// cell receives the geometric tail `2^{-L-2} sum_{m>=L} 2^{-mR}`.
pub fn takagi_antiderivative(r: f64, out_level: u32) -> Result<SampledPath> {
    check_takagi_exponent(r)?;
    if out_level == 0 {
        return Err(level_error(0, "antiderivative needs out_level >= 1"));
    }
    let x = takagi_landsberg(r, out_level, out_level)?;
    let h = 1.0 / (1u64 << out_level) as f64;
    let tail = h * 0.25 * (-(out_level as f64) * r).exp2() / (1.0 - (-r).exp2());
    let v = x.values();
    let cells = v.windows(2).map(|w| 0.5 * h * (w[0] + w[1]) + tail);
    let y = prefix_sums(cells);
    Ok(SampledPath::new(out_level, y)?.with_label(format!("takagi antiderivative R={r}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hat(t: f64) -> f64 {
        t.min(1.0 - t).max(0.0)
    }

    #[test]
    fn linear_function_has_no_wavelet_content() {
        for level in 1..8 {
            let c = analyze(&SampledPath::from_fn(level, |t| t).unwrap()).unwrap();
            assert_eq!(c.x0(), 0.0);
            assert_eq!(c.slope(), 1.0);
            assert!(c.generations().iter().flatten().all(|&t| t == 0.0));
        }
    }

    #[test]
    fn basis_function_identity() {
        let c = analyze(&SampledPath::from_fn(2, hat).unwrap()).unwrap();
        assert_eq!(c.generation(0), &[1.0]);
        assert_eq!(c.generation(1), &[0.0, 0.0]);
    }

    #[test]
    fn level_zero_is_rejected() {
        assert!(analyze(&SampledPath::new(0, vec![0.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn synthesize_examples() {
        let c = FaberSchauderCoeffs::new(0.0, 0.0, vec![vec![1.0]]).unwrap();
        assert_eq!(synthesize(&c, 1).unwrap().values(), &[0.0, 0.5, 0.0]);
        let mut z = FaberSchauderCoeffs::zeros(3);
        z.x0 = 3.0;
        assert!(synthesize(&z, 4).unwrap().values().iter().all(|&v| v == 3.0));
        assert!(synthesize(&FaberSchauderCoeffs::zeros(3), 2).is_err());
    }

    #[test]
    fn synthesize_matches_pointwise_series() {
        // brute force: evaluate the expansion function by function
        let c = FaberSchauderCoeffs::from_fn(0.3, -1.2, 4, |m, k| ((m * 7 + k as u32) as f64).sin());
        let p = synthesize(&c, 6).unwrap();
        for j in 0..p.len() {
            let t = p.time(j);
            let mut v = c.x0() + c.slope() * t;
            for m in 0..4u32 {
                for k in 0..1usize << m {
                    let s = (1u64 << m) as f64;
                    v += c.generation(m)[k] * (-0.5 * m as f64).exp2() * hat(s * t - k as f64);
                }
            }
            assert_relative_eq!(p.values()[j], v, epsilon = 1e-14);
        }
    }

    #[test]
    fn round_trip() {
        let p = SampledPath::from_fn(9, |t| (11.0 * t).cos() + t * t).unwrap();
        let q = synthesize(&analyze(&p).unwrap(), 9).unwrap();
        for (a, b) in p.values().iter().zip(q.values()) {
            assert_relative_eq!(a, b, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn locality() {
        let p = SampledPath::from_fn(5, |t| (5.0 * t).sin()).unwrap();
        let mut v = p.values().to_vec();
        // theta_{2,0} reads indices 0, 4, 8 at level 5; theta_{2,1} reads 8, 12, 16
        v[4] += 1.0;
        let q = SampledPath::new(5, v).unwrap();
        let (a, b) = (analyze(&p).unwrap(), analyze(&q).unwrap());
        assert_eq!(a.generation(2)[1], b.generation(2)[1]);
        assert_ne!(a.generation(2)[0], b.generation(2)[0]);
    }

    #[test]
    fn takagi_examples() {
        assert_eq!(takagi_landsberg(0.5, 1, 1).unwrap().values(), &[0.0, 0.5, 0.0]);
        let p = takagi_landsberg(1.0, 8, 8).unwrap();
        assert_relative_eq!(p.values()[128], 0.5, epsilon = 1e-15);
        for &r in &[0.2, 0.5, 0.9] {
            let c = analyze(&takagi_landsberg(r, 10, 10).unwrap()).unwrap();
            for m in 0..10 {
                let expected = (m as f64 * (0.5 - r)).exp2();
                for &t in c.generation(m) {
                    assert_relative_eq!(t, expected, max_relative = 1e-12);
                }
            }
        }
        assert!(takagi_landsberg(0.0, 2, 2).is_err());
        assert!(takagi_landsberg(1.5, 2, 2).is_err());
    }

    fn hat_primitive(s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else if s <= 0.5 {
            0.5 * s * s
        } else if s <= 1.0 {
            0.25 - 0.5 * (1.0 - s) * (1.0 - s)
        } else {
            0.25
        }
    }

    #[test]
    fn takagi_antiderivative_matches_wavelet_primitives() {
        // oracle: sum of closed-form primitives of e_{m,k} up to generation 15,
        // plus the geometric tail of the remaining generations
        let (r, level, deep) = (0.35, 5u32, 15u32);
        let y = takagi_antiderivative(r, level).unwrap();
        for j in 0..y.len() {
            let t = y.time(j);
            let mut acc = 0.0;
            for m in 0..deep {
                let s = (1u64 << m) as f64;
                let coeff = (m as f64 * (0.5 - r)).exp2() * (-0.5 * m as f64).exp2() / s;
                for k in 0..1usize << m {
                    acc += coeff * hat_primitive(s * t - k as f64);
                }
            }
            let tail: f64 = (deep..200).map(|m| t * 0.25 * (-(m as f64) * r).exp2()).sum();
            assert_relative_eq!(y.values()[j], acc + tail, epsilon = 1e-12);
        }
        assert_eq!(y.values()[0], 0.0);
    }

    #[test]
    fn takagi_tail_term_at_one() {
        // brute-force the tail sum over generations L..60 for R = 1/2
        let level = 6u32;
        let closed = (-(level as f64) / 2.0 - 2.0).exp2() / (1.0 - (-0.5f64).exp2());
        let brute: f64 = (level..=60).map(|m| 0.25 * (-(m as f64) * 0.5).exp2()).sum();
        assert_relative_eq!(closed, brute, max_relative = 1e-8);
        let y = takagi_antiderivative(0.5, level).unwrap();
        let trunc = synthesize(&takagi_coeffs(0.5, level).unwrap(), level).unwrap();
        let h = 1.0 / 64.0;
        let trapezoid: f64 = trunc.values().windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
        assert_relative_eq!(y.values()[64] - trapezoid, closed, max_relative = 1e-12);
    }

    #[test]
    fn coefficient_csv_rows() {
        let c = takagi_coeffs(0.5, 2).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 + 3);
        assert!(text.starts_with("m,k,theta\n"));
    }
}
