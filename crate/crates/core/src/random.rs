//! Seeded random test data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::SpectralGrid;
use crate::state::StateW;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent uniform values in `[−1, 1)`.
pub fn real_field(len: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..len).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// Random real `W` with uniform point values.
pub fn state(grid: &SpectralGrid, seed: u64) -> Result<StateW> {
    let n = grid.len();
    let f: Vec<Vec<f64>> = (0..4).map(|c| real_field(n, seed.wrapping_mul(4).wrapping_add(c))).collect();
    StateW::from_physical(grid, &f[0], [&f[1], &f[2], &f[3]])
}

/// Random 3-vector with entries in `[lo, hi)`.
pub fn vec3(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> [f64; 3] {
    [r.random_range(lo..hi), r.random_range(lo..hi), r.random_range(lo..hi)]
}
