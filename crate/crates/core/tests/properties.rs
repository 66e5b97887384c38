use proptest::prelude::*;

use roughness_kit::estimators::{rhat, vartheta_coeffs};
use roughness_kit::faber_schauder::{analyze, synthesize, FaberSchauderCoeffs};
use roughness_kit::generators::riemann_antiderivative;
use roughness_kit::harness::quantile_type7;
use roughness_kit::scale::{beta_weights, seq_scale_estimate, ScaleConfig};
use roughness_kit::theory::{q_apply, xi_coeffs};
use roughness_kit::SampledPath;

fn path(level: u32) -> impl Strategy<Value = SampledPath> {
    prop::collection::vec(-5.0f64..5.0, (1usize << level) + 1).prop_map(move |v| SampledPath::new(level, v).unwrap())
}

fn rough_coeffs(depth: u32) -> impl Strategy<Value = FaberSchauderCoeffs> {
    let total = (1usize << depth) - 1;
    (-1.0f64..1.0, -1.0f64..1.0, prop::collection::vec(-1.0f64..1.0, total), 0.1f64..0.9).prop_map(
        move |(x0, slope, flat, r)| {
            let mut c = FaberSchauderCoeffs::zeros(depth);
            let mut it = flat.into_iter();
            for m in 0..depth {
                let scale = (m as f64 * (0.5 - r)).exp2();
                for v in c.generation_mut(m) {
                    *v = scale * it.next().unwrap();
                }
            }
            FaberSchauderCoeffs::new(x0, slope, c.generations().to_vec()).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn restriction_composes(p in path(7), a in 0u32..=7, b in 0u32..=7) {
        let (hi, lo) = (a.max(b), a.min(b));
        prop_assert_eq!(p.restrict(hi).unwrap().restrict(lo).unwrap(), p.restrict(lo).unwrap());
    }

    #[test]
    fn analysis_round_trips(p in path(6)) {
        let q = synthesize(&analyze(&p).unwrap(), 6).unwrap();
        for (a, b) in p.values().iter().zip(q.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rhat_scale_law(c in rough_coeffs(10), lambda in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], n in 2u32..=8) {
        let y = riemann_antiderivative(&synthesize(&c, 10).unwrap(), 10).unwrap();
        if let (Ok(a), Ok(b)) = (rhat(&y, n), rhat(&y.scaled(lambda).unwrap(), n)) {
            prop_assert!((b - a + lambda.abs().log2() / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn vartheta_ignores_affine_terms(p in path(8), a in -3.0f64..3.0, b in -3.0f64..3.0, n in 0u32..=6) {
        let shifted = p.add(&SampledPath::from_fn(8, |t| a + b * t).unwrap()).unwrap();
        let u = vartheta_coeffs(&p, n).unwrap();
        let v = vartheta_coeffs(&shifted, n).unwrap();
        let tol = 1e-12 * (1.5 * n as f64 + 3.0).exp2() * 16.0;
        for (x, y) in u.values().iter().zip(v.values()) {
            prop_assert!((x - y).abs() < tol);
        }
    }

    #[test]
    fn seq_scale_is_scale_invariant(c in rough_coeffs(12), lambda in prop_oneof![-20.0f64..-0.05, 0.05f64..20.0]) {
        let y = riemann_antiderivative(&synthesize(&c, 12).unwrap(), 12).unwrap();
        let cfg = ScaleConfig::default();
        if let (Ok(a), Ok(b)) = (seq_scale_estimate(&y, 10, &cfg), seq_scale_estimate(&y.scaled(lambda).unwrap(), 10, &cfg)) {
            prop_assert!((a.r_s - b.r_s).abs() < 1e-10);
            prop_assert!((b.lambda_s * lambda.abs() - a.lambda_s).abs() < 1e-8 * a.lambda_s);
        }
    }

    #[test]
    fn beta_identities(m in 1usize..=5, extra in 0u32..12, weights in prop::collection::vec(0.0f64..3.0, 6), lead in 0.1f64..3.0) {
        let mut alpha = weights[..=m].to_vec();
        alpha[0] = lead;
        let cfg = ScaleConfig::new(m, alpha).unwrap();
        let n = cfg.min_level() + extra;
        let beta = beta_weights(n, &cfg).unwrap();
        let first = cfg.first_level(n);
        let sum: f64 = beta.iter().sum();
        let weighted: f64 = beta.iter().enumerate().map(|(i, b)| b / (first + i as u32) as f64).sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert!(weighted.abs() < 1e-9);
    }

    #[test]
    fn riemann_is_linear_and_monotone(p in path(8), q in path(8), a in -2.0f64..2.0, out in 0u32..=8) {
        let combo = p.scaled(a).unwrap().add(&q).unwrap();
        let lhs = riemann_antiderivative(&combo, out).unwrap();
        let (yp, yq) = (riemann_antiderivative(&p, out).unwrap(), riemann_antiderivative(&q, out).unwrap());
        for j in 0..lhs.len() {
            prop_assert!((lhs.values()[j] - (a * yp.values()[j] + yq.values()[j])).abs() < 1e-11);
        }
        let pos = riemann_antiderivative(&p.map(f64::abs).unwrap(), out).unwrap();
        prop_assert!(pos.values().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn xi_coefficients_sum_to_zero(n in 0u32..10, k in 0u32..10, frac in 0.0f64..1.0) {
        let i = 1 + ((frac * (1u64 << n) as f64) as usize).min((1usize << n) - 1);
        let xi = xi_coeffs(n, k, i).unwrap();
        prop_assert!(xi.sum().abs() < 1e-12 * (0.5 * n as f64).exp2());
    }

    #[test]
    fn q_apply_kills_constants_and_is_linear(z in prop::collection::vec(-10.0f64..10.0, 64), c in -5.0f64..5.0) {
        let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
        let a = q_apply(&z).unwrap();
        let b = q_apply(&shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn quantiles_are_ordered(mut xs in prop::collection::vec(-100.0f64..100.0, 1..60)) {
        xs.sort_by(f64::total_cmp);
        let qs: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&p| quantile_type7(&xs, p)).collect();
        prop_assert!(qs.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(qs[0], xs[0]);
        prop_assert_eq!(qs[4], xs[xs.len() - 1]);
    }
}
