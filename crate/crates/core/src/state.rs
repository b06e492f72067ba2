use rayon::prelude::*;

use crate::error::Result;
use crate::grid::SpectralGrid;
use crate::C64;

/// Spectral coefficients of `W = (ρ, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateW {
    pub rho: Vec<C64>,
    pub u: [Vec<C64>; 3],
}

impl StateW {
    pub fn zeros(len: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); len];
        StateW { rho: z.clone(), u: [z.clone(), z.clone(), z] }
    }

    /// From real physical fields; the spectra are conjugate-symmetric by
    /// construction.
    pub fn from_physical(grid: &SpectralGrid, rho: &[f64], u: [&[f64]; 3]) -> Result<Self> {
        Ok(StateW {
            rho: grid.to_spectral(rho)?,
            u: [grid.to_spectral(u[0])?, grid.to_spectral(u[1])?, grid.to_spectral(u[2])?],
        })
    }

    /// Real parts of the physical fields, `[ρ, u₁, u₂, u₃]`.
    pub fn to_physical(&self, grid: &SpectralGrid) -> Result<[Vec<f64>; 4]> {
        Ok([
            grid.to_physical_real(&self.rho)?,
            grid.to_physical_real(&self.u[0])?,
            grid.to_physical_real(&self.u[1])?,
            grid.to_physical_real(&self.u[2])?,
        ])
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn components(&self) -> [&Vec<C64>; 4] {
        [&self.rho, &self.u[0], &self.u[1], &self.u[2]]
    }

    pub fn components_mut(&mut self) -> [&mut Vec<C64>; 4] {
        let [u0, u1, u2] = &mut self.u;
        [&mut self.rho, u0, u1, u2]
    }

    /// Coefficients at one frequency, `(ρ̂, û₁, û₂, û₃)`.
    #[inline]
    pub fn at(&self, idx: usize) -> [C64; 4] {
        [self.rho[idx], self.u[0][idx], self.u[1][idx], self.u[2][idx]]
    }

    /// `self += a·other`.
    pub fn axpy(&mut self, a: f64, other: &StateW) {
        for (x, y) in self.components_mut().into_iter().zip(other.components()) {
            x.par_iter_mut().zip(y.par_iter()).for_each(|(x, y)| *x += a * y);
        }
    }

    pub fn scale(&mut self, a: f64) {
        for x in self.components_mut() {
            x.par_iter_mut().for_each(|x| *x *= a);
        }
    }

    /// Apply a per-frequency map to all four components at once.
    pub fn map_freq<F>(&self, f: F) -> StateW
    where
        F: Fn(usize, [C64; 4]) -> [C64; 4] + Sync,
    {
        let len = self.len();
        let out: Vec<[C64; 4]> = (0..len).into_par_iter().map(|i| f(i, self.at(i))).collect();
        let mut w = StateW::zeros(len);
        for (i, v) in out.into_iter().enumerate() {
            w.rho[i] = v[0];
            w.u[0][i] = v[1];
            w.u[1][i] = v[2];
            w.u[2][i] = v[3];
        }
        w
    }

    /// Largest coefficient difference relative to the largest coefficient of
    /// `self`.
    pub fn max_rel_diff(&self, other: &StateW) -> f64 {
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for (a, b) in self.components().into_iter().zip(other.components()) {
            for (x, y) in a.iter().zip(b) {
                num = num.max((x - y).norm());
                den = den.max(x.norm());
            }
        }
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }
}
