//! Three-dimensional complex FFT on an `n³` cube stored with the last axis
//! contiguous. Axes flagged as shifted use wavenumbers `m + 1/2`, realized by a
//! twist `e^{∓iπj/n}` around the ordinary transform along that axis.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Number of complex values each parallel task transforms at once.
const TASK_LEN: usize = 1 << 14;
/// Column block width for the axis-0 gather.
const BLOCK: usize = 16;

#[derive(Clone)]
pub(crate) struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    twist: [Option<Arc<Vec<C64>>>; 3],
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub(crate) fn new(n: usize, shift: [bool; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let tw: Arc<Vec<C64>> =
            Arc::new((0..n).map(|j| C64::from_polar(1.0, -PI * j as f64 / n as f64)).collect());
        let twist = shift.map(|s| if s { Some(tw.clone()) } else { None });
        Fft3 { n, fwd, inv, twist }
    }

    /// Unnormalized forward transform, in place.
    pub(crate) fn forward(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        self.run(data, scratch, false);
    }

    /// Inverse transform including the `1/n³` factor, in place.
    pub(crate) fn inverse(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        self.run(data, scratch, true);
        let s = 1.0 / (self.n * self.n * self.n) as f64;
        data.par_chunks_mut(TASK_LEN).for_each(|c| c.iter_mut().for_each(|x| *x *= s));
    }

    fn run(&self, data: &mut [C64], scratch: &mut Vec<C64>, inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let plan = if inverse { &self.inv } else { &self.fwd };

        // axis 2: contiguous rows
        rows(data, n, plan, self.twist[2].as_deref(), inverse);

        // axis 1: transpose each (axis1, axis2) slab, transform, transpose back
        let tw1 = self.twist[1].as_deref();
        data.par_chunks_mut(n * n).for_each(|slab| {
            transpose_square(slab, n);
            rows_seq(slab, n, plan, tw1, inverse);
            transpose_square(slab, n);
        });

        // axis 0: gather columns into scratch rows, transform, scatter back
        scratch.resize(n * n * n, C64::new(0.0, 0.0));
        let nn = n * n;
        {
            let src = &*data;
            scratch.par_chunks_mut(n * BLOCK).enumerate().for_each(|(b, block)| {
                let jl0 = b * BLOCK;
                let width = block.len() / n;
                for i in 0..n {
                    let base = i * nn + jl0;
                    for t in 0..width {
                        block[t * n + i] = src[base + t];
                    }
                }
            });
        }
        rows(scratch, n, plan, self.twist[0].as_deref(), inverse);
        let src = &*scratch;
        data.par_chunks_mut(nn).enumerate().for_each(|(i, slab)| {
            for (jl, x) in slab.iter_mut().enumerate() {
                *x = src[jl * n + i];
            }
        });
    }
}

fn rows(buf: &mut [C64], n: usize, plan: &Arc<dyn Fft<f64>>, tw: Option<&Vec<C64>>, inverse: bool) {
    let per_task = (TASK_LEN / n).max(1) * n;
    buf.par_chunks_mut(per_task).for_each(|chunk| rows_seq(chunk, n, plan, tw, inverse));
}

fn rows_seq(chunk: &mut [C64], n: usize, plan: &Arc<dyn Fft<f64>>, tw: Option<&Vec<C64>>, inverse: bool) {
    let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    if let (Some(tw), false) = (tw, inverse) {
        for row in chunk.chunks_mut(n) {
            row.iter_mut().zip(tw.iter()).for_each(|(x, w)| *x *= w);
        }
    }
    plan.process_with_scratch(chunk, &mut scratch);
    if let (Some(tw), true) = (tw, inverse) {
        for row in chunk.chunks_mut(n) {
            row.iter_mut().zip(tw.iter()).for_each(|(x, w)| *x *= w.conj());
        }
    }
}

fn transpose_square(m: &mut [C64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            m.swap(i * n + j, j * n + i);
        }
    }
}
