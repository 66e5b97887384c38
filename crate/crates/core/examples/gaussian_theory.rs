//! Closed-form covariance quantities for fBM and a Monte Carlo comparison.

use roughness_kit::generators::{path_rng, riemann_antiderivative, FbmGenerator};
use roughness_kit::theory::{
    alpha_beta_table, condition_w_diagnostic, eigen_range, gamma_matrix, hurst_grid, q_matrix, spectral_norm, GhTable,
};

fn main() -> roughness_kit::Result<()> {
    let g = GhTable::new(0.3, 6)?;
    println!("g_H for H=0.3, lags 0..6: {:.5?}", g.values);

    println!("{:>5} {:>9} {:>9} {:>9}", "H", "alpha", "beta", "ratio");
    for c in alpha_beta_table(&hurst_grid(0.1, 0.9, 0.2)?)? {
        println!("{:>5.2} {:>9.5} {:>9.5} {:>9.5}", c.hurst, c.alpha, c.beta, c.ratio);
    }

    let m = gamma_matrix(4, 0.3)?;
    let (lo, hi) = eigen_range(&m.gamma);
    println!("Gamma_4 eigenvalues in [{lo:.4}, {hi:.4}]");
    println!("||Q_4||_2 = {:.6}", spectral_norm(&q_matrix(4)?, 200));

    let h = 0.3;
    let gen = FbmGenerator::new(h, 17)?;
    let samples: Vec<_> = (0..40)
        .map(|i| {
            let x = gen.sample(&mut path_rng(2024, i));
            let y = riemann_antiderivative(&x, 14).unwrap();
            (x, y)
        })
        .collect();
    for row in condition_w_diagnostic(&samples, 8..=12, Some(h))? {
        println!(
            "n={:<3} ratio mean {:.4} (sd {:.4}, max {:.4}), limit {:.4}",
            row.n,
            row.mean,
            row.std,
            row.max,
            row.limit.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
