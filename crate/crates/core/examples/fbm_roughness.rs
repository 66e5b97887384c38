//! Estimate the Hurst parameter of fractional Brownian motion from samples
//! of its antiderivative, using the raw and the scale-corrected estimator.

use roughness_kit::generators::{riemann_antiderivative, FbmSpec};
use roughness_kit::{rhat, seq_scale_estimate, ScaleConfig};

fn main() -> roughness_kit::Result<()> {
    let cfg = ScaleConfig::default();
    let (fine, obs) = (18, 16);
    println!("{:>5} {:>4} {:>9} {:>9}", "H", "n", "rhat", "R^s");
    for h in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let x = roughness_kit::generators::fbm_sample(&FbmSpec::new(h, fine, 7)?)?;
        let y = riemann_antiderivative(&x, obs)?;
        for n in [8, 11, 14] {
            let s = seq_scale_estimate(&y, n, &cfg)?;
            println!("{h:>5.2} {n:>4} {:>9.4} {:>9.4}", rhat(&y, n)?, s.r_s);
        }
    }
    Ok(())
}
