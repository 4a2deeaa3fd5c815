//! Reproducible random streams.
//!
//! Each simulated path draws from its own ChaCha stream selected by
//! `(seed, path index)`. ChaCha is a counter-mode generator, so a path's
//! draws never depend on which thread produced the neighbouring paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// `n` i.i.d. standard normals for one path.
pub fn standard_normals(seed: u64, path: u64, n: usize) -> Vec<f64> {
    let mut rng = path_rng(seed, path);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}
