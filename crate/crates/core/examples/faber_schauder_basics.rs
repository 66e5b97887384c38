//! Faber–Schauder analysis of a sampled path: coefficients by generation,
//! the exact round trip, and how smoothness shows up as coefficient decay.

use roughness_kit::faber_schauder::{analyze, synthesize};
use roughness_kit::numeric::l2_norm;
use roughness_kit::{DyadicIndex, SampledPath};

fn main() -> roughness_kit::Result<()> {
    let level = 10;
    let smooth = SampledPath::from_fn(level, |t| (6.0 * t).sin() + t * t)?;
    let kinked = SampledPath::from_fn(level, |t| (t - 0.3).abs().sqrt())?;

    for (name, path) in [("smooth", &smooth), ("sqrt-kink", &kinked)] {
        let c = analyze(path)?;
        println!("{name}: x0 = {:.4}, slope = {:.4}", c.x0(), c.slope());
        for m in 0..c.depth() {
            let g = c.generation(m);
            println!("  m={m:<2} |theta_m| = {:.3e}", l2_norm(g));
        }
        let back = synthesize(&c, level)?;
        let err = back.values().iter().zip(path.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("  round-trip max error {err:.1e}");
    }

    let idx = DyadicIndex::new(3, 5)?;
    println!("support of e_(3,5): {:?}", idx.support());
    Ok(())
}
