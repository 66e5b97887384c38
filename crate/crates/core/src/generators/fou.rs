use super::fbm::{check_hurst, fbm_sample, FbmSpec};
use crate::error::{invalid, Result};
use crate::grid::SampledPath;

/// Fractional Ornstein–Uhlenbeck process
/// `X_t = x0 + ρ ∫_0^t (μ - X_s) ds + W^H_t` on `T_level`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FouSpec {
    pub hurst: f64,
    pub x0: f64,
    pub rho: f64,
    pub mu: f64,
    pub level: u32,
    pub seed: u64,
}

impl FouSpec {
    pub fn new(hurst: f64, x0: f64, rho: f64, mu: f64, level: u32, seed: u64) -> Result<Self> {
        check_hurst(hurst)?;
        if ![x0, rho, mu].iter().all(|v| v.is_finite()) {
            return Err(invalid("fOU parameters must be finite"));
        }
        Ok(Self {
            hurst,
            x0,
            rho,
            mu,
            level,
            seed,
        })
    }

    pub fn driver(&self) -> FbmSpec {
        FbmSpec {
            hurst: self.hurst,
            level: self.level,
            seed: self.seed,
        }
    }
}

/// Explicit Euler scheme driven by one fBM path `w` on the same grid:
/// `X_{k+1} = X_k + ρ (μ - X_k) h + (w_{k+1} - w_k)`, `X_0 = x0`.
///
/// Computed as `X_k = x0 + w_k + D_k` with the accumulated drift
/// `D_{k+1} = D_k + ρ (μ - X_k) h`, which is the same recursion but makes
/// `ρ = 0` return `x0 + w` exactly.
pub fn fou_from_fbm(w: &SampledPath, x0: f64, rho: f64, mu: f64) -> Result<SampledPath> {
    let h = (-(w.level() as f64)).exp2();
    let mut drift = 0.0;
    let mut values = Vec::with_capacity(w.len());
    for &wk in w.values() {
        let x = x0 + wk + drift;
        values.push(x);
        drift += rho * (mu - x) * h;
    }
    SampledPath::new(w.level(), values)
}

/// fOU path for `spec`, driven by `fbm_sample(spec.driver())`.
pub fn fou_euler(spec: &FouSpec) -> Result<SampledPath> {
    let w = fbm_sample(&spec.driver())?;
    fou_from_fbm(&w, spec.x0, spec.rho, spec.mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{path_rng, FbmGenerator};

    #[test]
    fn no_drift_is_shifted_fbm() {
        let spec = FouSpec::new(0.3, 1.25, 0.0, 2.0, 8, 4).unwrap();
        let x = fou_euler(&spec).unwrap();
        let w = fbm_sample(&spec.driver()).unwrap();
        for (a, b) in x.values().iter().zip(w.values()) {
            assert_eq!(*a, 1.25 + b);
        }
    }

    #[test]
    fn matches_textbook_recursion() {
        let w = fbm_sample(&FbmSpec::new(0.4, 6, 2).unwrap()).unwrap();
        let (x0, rho, mu) = (0.3, 1.7, -0.5);
        let x = fou_from_fbm(&w, x0, rho, mu).unwrap();
        let h = 1.0 / 64.0;
        let mut prev = x0;
        for k in 0..64 {
            let next = prev + rho * (mu - prev) * h + (w.values()[k + 1] - w.values()[k]);
            assert!((x.values()[k + 1] - next).abs() < 1e-12);
            prev = next;
        }
    }

    #[test]
    fn constant_solution_without_noise() {
        let w = SampledPath::from_fn(5, |_| 0.0).unwrap();
        let x = fou_from_fbm(&w, 2.0, 3.0, 2.0).unwrap();
        assert!(x.values().iter().all(|&v| v == 2.0));
    }

    #[test]
    fn mean_reverts_toward_mu() {
        // drift pulls the mean at t=1 above the driftless mean x0 = 0
        let g = FbmGenerator::new(0.3, 8).unwrap();
        let (mut with, mut without) = (Vec::new(), Vec::new());
        for i in 0..10_000 {
            let w = g.sample(&mut path_rng(21, i));
            with.push(*fou_from_fbm(&w, 0.0, 0.2, 2.0).unwrap().values().last().unwrap());
            without.push(*w.values().last().unwrap());
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let sd = |v: &[f64]| {
            let m = mean(v);
            (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
        };
        let m = mean(&with);
        let se = sd(&with) / 100.0;
        // Euler mean at t=1: μ (1 - (1 - ρh)^{2^N}) with x0 = 0
        let expected = 2.0 * (1.0 - (1.0 - 0.2 / 256.0f64).powi(256));
        assert!(m > mean(&without));
        assert!(m > 0.0);
        assert!((m - expected).abs() < 3.0 * se, "{m} vs {expected}");
    }

    #[test]
    fn fast_reversion_brownian_mean() {
        let g = FbmGenerator::new(0.5, 10).unwrap();
        let finals: Vec<f64> = (0..10_000)
            .map(|i| *fou_from_fbm(&g.sample(&mut path_rng(33, i)), 0.0, 20.0, 1.5).unwrap().values().last().unwrap())
            .collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        assert!((mean - 1.5).abs() < 0.1);
    }

    #[test]
    fn euler_refinement_report() {
        // same Brownian driver seen at levels N and N+2; sup distance shrinks
        let g = FbmGenerator::new(0.5, 12).unwrap();
        let fine = g.sample(&mut path_rng(5, 0));
        let dist = |coarse_level: u32| {
            let a = fou_from_fbm(&fine.restrict(coarse_level).unwrap(), 0.0, 5.0, 1.0).unwrap();
            let b = fou_from_fbm(&fine.restrict(coarse_level + 2).unwrap(), 0.0, 5.0, 1.0)
                .unwrap()
                .restrict(coarse_level)
                .unwrap();
            a.values().iter().zip(b.values()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
        };
        let (d4, d8) = (dist(4), dist(8));
        eprintln!("Euler refinement sup distance: level 4 -> {d4:.3e}, level 8 -> {d8:.3e}");
        assert!(d8.is_finite() && d4.is_finite());
    }
}
