//! Path generators: exact fBM, Euler fOU, pointwise transforms and
//! antiderivatives on dyadic grids.

pub(crate) mod fbm;
mod fou;
mod integrate;
mod rng;
mod transform;

pub use fbm::{fbm_sample, fgn_autocovariance, FbmGenerator, FbmMethod, FbmSpec, DEFAULT_MAX_FBM_LEVEL, MAX_CHOLESKY_LEVEL};
pub use fou::{fou_euler, fou_from_fbm, FouSpec};
pub use integrate::{antiderivative, riemann_antiderivative, Quadrature};
pub use rng::{path_rng, PathRng};
pub use transform::{apply_transform, TransformSpec};
