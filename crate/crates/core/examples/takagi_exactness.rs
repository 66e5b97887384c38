//! The Takagi–Landsberg antiderivative has a known roughness exponent, and
//! `rhat` returns it exactly on every level.

use roughness_kit::{rhat, rhat_star, takagi_antiderivative, takagi_landsberg};

fn main() -> roughness_kit::Result<()> {
    let level = 16;
    println!("{:>5} {:>4} {:>14} {:>14}", "R", "n", "rhat", "rhat_star");
    for r in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let y = takagi_antiderivative(r, level)?;
        let x = takagi_landsberg(r, level, level)?;
        for n in [4, 8, 12, 14] {
            // rhat_star reads the function itself on level n + 1
            println!("{r:>5.2} {n:>4} {:>14.12} {:>14.12}", rhat(&y, n)?, rhat_star(&x, n)?);
        }
    }
    Ok(())
}
