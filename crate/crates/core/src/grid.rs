//! Periodic grid, its wavenumbers, and the physical/spectral transforms.
//!
//! Index layout is `(i·n + j)·n + l` with `l` running along `x₃`. Spectral
//! arrays are in FFT order: index `i` carries `m = i` for `i < n/2` and `m = i − n`
//! otherwise, and the wavenumber is `2π(m + s)/L` with `s ∈ {0, 1/2}`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fft::Fft3;
use crate::C64;

#[derive(Clone, Debug)]
pub struct SpectralGrid {
    n: usize,
    box_len: f64,
    shift: [bool; 3],
    k: [Vec<f64>; 3],
    fft: Fft3,
}

/// Grid with `n` a power of two. The vertical wavenumbers are shifted by one
/// half whenever an unshifted grid would contain `(0, 0, ±κ⁻¹)`.
/// `kappa = +∞` (no rotation) never triggers the shift.
pub fn build_grid(n: usize, box_len: f64, kappa: f64) -> Result<SpectralGrid> {
    if !n.is_power_of_two() || n < 8 {
        return invalid(format!("grid size must be a power of two >= 8, got {n}"));
    }
    SpectralGrid::construct(n, box_len, kappa)
}

impl SpectralGrid {
    /// Like [`build_grid`] but accepts any even `n ≥ 8` whose only prime factors
    /// are 2, 3 and 5 (e.g. 96).
    pub fn smooth(n: usize, box_len: f64, kappa: f64) -> Result<SpectralGrid> {
        let mut m = n;
        for p in [2, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        if n < 8 || n % 2 != 0 || m != 1 {
            return invalid(format!("grid size must be an even 5-smooth number >= 8, got {n}"));
        }
        Self::construct(n, box_len, kappa)
    }

    fn construct(n: usize, box_len: f64, kappa: f64) -> Result<SpectralGrid> {
        if !(box_len.is_finite() && box_len > 0.0) {
            return invalid(format!("box length must be positive and finite, got {box_len}"));
        }
        if kappa.is_nan() || kappa <= 0.0 {
            return invalid(format!("kappa must be positive, got {kappa}"));
        }
        let inv = 1.0 / kappa;
        let mut shift = [false; 3];
        if collides(n, box_len, 0.0, inv) {
            shift[2] = true;
            if collides(n, box_len, 0.5, inv) {
                return Err(Error::Singular([0.0, 0.0, inv]));
            }
        }
        let k = [0, 1, 2].map(|a| axis_wavenumbers(n, box_len, if shift[a] { 0.5 } else { 0.0 }));
        Ok(SpectralGrid { n, box_len, shift, k, fft: Fft3::new(n, shift) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    pub fn shift(&self) -> [bool; 3] {
        self.shift
    }

    pub fn is_shifted(&self) -> bool {
        self.shift.iter().any(|&s| s)
    }

    /// Total number of points, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one cell, `(L/n)³`.
    pub fn cell_volume(&self) -> f64 {
        (self.box_len / self.n as f64).powi(3)
    }

    /// Wavenumbers along `axis` in FFT order.
    pub fn axis_k(&self, axis: usize) -> &[f64] {
        &self.k[axis]
    }

    /// Integer mode label `m` of FFT index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn split(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    pub fn freq(&self, idx: usize) -> [f64; 3] {
        let (i, j, l) = self.split(idx);
        [self.k[0][i], self.k[1][j], self.k[2][l]]
    }

    /// Index of `−ξ`.
    pub fn neg_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i, j, l) = self.split(idx);
        let flip = |a: usize, v: usize| if self.shift[a] { n - 1 - v } else { (n - v) % n };
        (flip(0, i) * n + flip(1, j)) * n + flip(2, l)
    }

    /// Physical coordinate of grid point `j` along any axis.
    pub fn coord(&self, j: usize) -> f64 {
        j as f64 * self.box_len / self.n as f64
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let (i, j, l) = self.split(idx);
        [self.coord(i), self.coord(j), self.coord(l)]
    }

    /// True on the unpaired `m = −n/2` plane of an unshifted axis.
    pub fn is_nyquist(&self, axis: usize, i: usize) -> bool {
        !self.shift[axis] && i == self.n / 2
    }

    /// Largest `|ξ_a|` over the grid along `axis`.
    pub fn k_max_axis(&self, axis: usize) -> f64 {
        self.k[axis].iter().fold(0.0, |m, k| f64::max(m, k.abs()))
    }

    /// Zero the coefficients on the unpaired `m = −n/2` planes, where a real
    /// field's spectrum cannot follow an odd-in-`ξ` multiplier.
    pub fn zero_nyquist(&self, coeffs: &mut [C64]) {
        let n = self.n;
        coeffs.par_iter_mut().enumerate().for_each(|(idx, c)| {
            let (i, j, l) = (idx / (n * n), (idx / n) % n, idx % n);
            if self.is_nyquist(0, i) || self.is_nyquist(1, j) || self.is_nyquist(2, l) {
                *c = C64::new(0.0, 0.0);
            }
        });
    }

    pub(crate) fn check(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::Shape { expected: self.len(), got: len });
        }
        Ok(())
    }

    pub fn to_spectral(&self, field: &[f64]) -> Result<Vec<C64>> {
        self.check(field.len())?;
        let mut data: Vec<C64> = field.par_iter().map(|&x| C64::new(x, 0.0)).collect();
        self.fft.forward(&mut data, &mut Vec::new());
        Ok(data)
    }

    pub fn to_spectral_complex(&self, field: &[C64]) -> Result<Vec<C64>> {
        self.check(field.len())?;
        let mut data = field.to_vec();
        self.fft.forward(&mut data, &mut Vec::new());
        Ok(data)
    }

    pub fn to_physical(&self, coeffs: &[C64]) -> Result<Vec<C64>> {
        self.check(coeffs.len())?;
        let mut data = coeffs.to_vec();
        self.fft.inverse(&mut data, &mut Vec::new());
        Ok(data)
    }

    /// Real part of [`Self::to_physical`], for spectra known to be
    /// conjugate-symmetric.
    pub fn to_physical_real(&self, coeffs: &[C64]) -> Result<Vec<f64>> {
        Ok(self.to_physical(coeffs)?.into_iter().map(|z| z.re).collect())
    }

    pub(crate) fn forward_inplace(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        self.fft.forward(data, scratch);
    }

    pub(crate) fn inverse_inplace(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        self.fft.inverse(data, scratch);
    }

    /// Evaluate `f(idx, ξ)` at every frequency, in parallel.
    pub fn map_freq<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, [f64; 3]) -> T + Sync,
    {
        (0..self.len()).into_par_iter().map(|idx| f(idx, self.freq(idx))).collect()
    }
}

fn axis_wavenumbers(n: usize, box_len: f64, s: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let m = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
            2.0 * PI * (m + s) / box_len
        })
        .collect()
}

fn collides(n: usize, box_len: f64, s: f64, inv_kappa: f64) -> bool {
    if inv_kappa == 0.0 {
        return false;
    }
    let dk = 2.0 * PI / box_len;
    let m = (inv_kappa / dk - s).round();
    let lo = -(n as f64) / 2.0;
    let hi = n as f64 / 2.0;
    // ±κ⁻¹ is in the set if either m or −m−2s is an admissible label
    let admissible = (m >= lo && m < hi) || (-m - 2.0 * s >= lo && -m - 2.0 * s < hi);
    admissible && ((m + s) * dk - inv_kappa).abs() <= 1e-6 * dk
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third_axis(g: &SpectralGrid) -> Vec<f64> {
        let mut k: Vec<f64> = g.axis_k(2).to_vec();
        k.sort_by(f64::total_cmp);
        k
    }

    #[test]
    fn collision_triggers_shift() {
        let g = build_grid(8, 2.0 * PI, 1.0).unwrap();
        assert_eq!(g.shift(), [false, false, true]);
        let k = third_axis(&g);
        assert!((k[0] + 3.5).abs() < 1e-14 && (k[7] - 3.5).abs() < 1e-14);
    }

    #[test]
    fn no_collision_no_shift() {
        let g = build_grid(8, 2.0 * PI, 0.3).unwrap();
        assert!(!g.is_shifted());
        let k = third_axis(&g);
        assert!((k[0] + 4.0).abs() < 1e-14 && (k[7] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn out_of_band_singular_point_needs_no_shift() {
        // κ⁻¹ = 10 lies beyond the largest wavenumber of an 8-point grid
        assert!(!build_grid(8, 2.0 * PI, 0.1).unwrap().is_shifted());
        assert!(build_grid(32, 2.0 * PI, 0.1).unwrap().is_shifted());
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_grid(6, 1.0, 1.0).is_err());
        assert!(build_grid(4, 1.0, 1.0).is_err());
        assert!(build_grid(8, f64::NAN, 1.0).is_err());
        assert!(build_grid(8, 1.0, f64::NAN).is_err());
        assert!(SpectralGrid::smooth(96, 1.0, 1.0).is_ok());
        assert!(SpectralGrid::smooth(14, 1.0, 1.0).is_err());
    }

    #[test]
    fn no_rotation_grid() {
        let g = build_grid(8, 2.0 * PI, f64::INFINITY).unwrap();
        assert!(!g.is_shifted());
    }

    #[test]
    fn neg_index_negates() {
        for g in [build_grid(8, 2.0 * PI, 1.0).unwrap(), build_grid(8, 2.0 * PI, 0.3).unwrap()] {
            for idx in 0..g.len() {
                let (i, j, l) = g.split(idx);
                if g.is_nyquist(0, i) || g.is_nyquist(1, j) || g.is_nyquist(2, l) {
                    continue;
                }
                let a = g.freq(idx);
                let b = g.freq(g.neg_index(idx));
                for c in 0..3 {
                    assert!((a[c] + b[c]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cosine_has_one_pair() {
        let g = build_grid(8, 2.0 * PI, 0.3).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|i| g.point(i)[0].cos()).collect();
        let fh = g.to_spectral(&f).unwrap();
        let big: Vec<usize> = (0..g.len()).filter(|&i| fh[i].norm() > 1e-9).collect();
        assert_eq!(big.len(), 2);
        for i in big {
            let xi = g.freq(i);
            assert!((xi[0].abs() - 1.0).abs() < 1e-14 && xi[1] == 0.0 && xi[2] == 0.0);
            assert!((fh[i].re - 256.0).abs() < 1e-9);
        }
    }
}
