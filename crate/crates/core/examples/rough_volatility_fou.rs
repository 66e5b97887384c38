//! Rough volatility toy model: log-volatility is a fractional OU process,
//! only integrated variance is observed.

use roughness_kit::generators::{antiderivative, apply_transform, fou_euler, FouSpec, Quadrature, TransformSpec};
use roughness_kit::{rhat, seq_scale_estimate, ScaleConfig};

fn main() -> roughness_kit::Result<()> {
    let cfg = ScaleConfig::default();
    let n = 12;
    for h in [0.1, 0.3] {
        println!("H = {h}");
        for seed in 0..4 {
            let x = fou_euler(&FouSpec::new(h, -5.0, 0.3, -5.0, 18, seed)?)?;
            let sigma2 = apply_transform(&x, &TransformSpec::Exp2)?;
            let y = antiderivative(&sigma2, n + 2, Quadrature::RightRiemann)?;
            let s = seq_scale_estimate(&y, n, &cfg)?;
            println!("  seed {seed}: rhat = {:.4}  R^s = {:.4}", rhat(&y, n)?, s.r_s);
        }
    }
    Ok(())
}
