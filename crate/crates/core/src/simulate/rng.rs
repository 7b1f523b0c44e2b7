//! Per-path random streams.
//!
//! Each path draws from its own ChaCha stream keyed by the master seed and
//! selected by the path index, so a path's normals do not depend on which
//! worker runs it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type PathStream = ChaCha8Rng;

pub fn derive_stream(master_seed: u64, path_index: u64) -> PathStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(path_index);
    rng
}

#[inline]
pub fn standard_normal(rng: &mut PathStream) -> f64 {
    rng.sample(StandardNormal)
}
