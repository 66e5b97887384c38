use serde::{Deserialize, Serialize};

use crate::error::{level_error, Result};
use crate::grid::SampledPath;
use crate::numeric::CompensatedSum;

/// Quadrature used to turn a fine path into its antiderivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    /// `h sum_{i=1}^{j} x_i`.
    #[default]
    RightRiemann,
    /// `h sum_{i=1}^{j} (x_{i-1} + x_i) / 2`.
    Trapezoid,
}

/// Right-endpoint Riemann antiderivative of `x` sampled on `T_out_level`:
/// `Y(j 2^-out) = 2^-N sum_{i=1}^{j 2^{N-out}} x(i 2^-N)` with `N = x.level()`.
pub fn riemann_antiderivative(x: &SampledPath, out_level: u32) -> Result<SampledPath> {
    antiderivative(x, out_level, Quadrature::RightRiemann)
}

/// Antiderivative of `x` on `T_out_level` with the chosen quadrature; the
/// running sum is compensated so long fine grids lose no accuracy.
pub fn antiderivative(x: &SampledPath, out_level: u32, quadrature: Quadrature) -> Result<SampledPath> {
    if out_level > x.level() {
        return Err(level_error(
            out_level as i64,
            format!("cannot integrate a level-{} path onto a finer grid", x.level()),
        ));
    }
    let h = (-(x.level() as f64)).exp2();
    let stride = 1usize << (x.level() - out_level);
    let v = x.values();
    let mut acc = CompensatedSum::default();
    let mut out = Vec::with_capacity((1usize << out_level) + 1);
    out.push(0.0);
    for i in 1..v.len() {
        match quadrature {
            Quadrature::RightRiemann => acc.add(v[i]),
            Quadrature::Trapezoid => {
                acc.add(0.5 * v[i - 1]);
                acc.add(0.5 * v[i]);
            }
        }
        if i % stride == 0 {
            out.push(h * acc.value());
        }
    }
    SampledPath::new(out_level, out)
}
