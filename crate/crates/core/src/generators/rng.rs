use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Counter-based generator used for every simulated path.
pub type PathRng = ChaCha20Rng;

/// Generator for path `path_index` of a run seeded with `base_seed`.
///
/// ChaCha20 keyed by `base_seed`, with `path_index` selecting the stream, so
/// each path's draws depend only on `(base_seed, path_index)` and not on which
/// worker thread produced it.
pub fn path_rng(base_seed: u64, path_index: u64) -> PathRng {
    let mut rng = ChaCha20Rng::seed_from_u64(base_seed);
    rng.set_stream(path_index);
    rng
}
