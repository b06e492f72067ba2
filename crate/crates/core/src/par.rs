//! Reductions with a fixed chunking so results do not depend on the number of
//! worker threads.

use rayon::prelude::*;

const CHUNK: usize = 4096;

/// `Σ_i f(i)` for `i < len`, summed per fixed-size chunk and then in order.
pub(crate) fn sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partial: Vec<f64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(len);
            (lo..hi).map(&f).sum::<f64>()
        })
        .collect();
    partial.iter().sum()
}

pub(crate) fn max<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..len)
        .into_par_iter()
        .with_min_len(CHUNK)
        .map(&f)
        .reduce(|| 0.0, f64::max)
}
