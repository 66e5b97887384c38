//! Multiplying a path by `lambda` shifts `rhat` by `log2|lambda| / n`.
//! The sequential scale estimator removes that shift.

use roughness_kit::generators::{fbm_sample, riemann_antiderivative, FbmSpec};
use roughness_kit::{beta_weights, rhat, seq_scale_estimate, ScaleConfig};

fn main() -> roughness_kit::Result<()> {
    let y = riemann_antiderivative(&fbm_sample(&FbmSpec::new(0.4, 16, 11)?)?, 14)?;
    let cfg = ScaleConfig::new(3, vec![1.0, 1.0, 1.0, 1.0])?;
    let n = 12;

    println!("{:>10} {:>9} {:>9} {:>12}", "lambda", "rhat", "R^s", "lambda_s");
    for lambda in [1e-3, 0.1, 1.0, 10.0, -250.0] {
        let yl = y.scaled(lambda)?;
        let s = seq_scale_estimate(&yl, n, &cfg)?;
        println!("{lambda:>10} {:>9.4} {:>9.4} {:>12.4e}", rhat(&yl, n)?, s.r_s, s.lambda_s);
    }

    // R^s is a linear combination of the rhat window with these weights
    let beta = beta_weights(n, &cfg)?;
    println!("beta weights for n={n}: {beta:.4?}");
    println!("sum = {:.3e}", beta.iter().sum::<f64>() - 1.0);
    Ok(())
}
