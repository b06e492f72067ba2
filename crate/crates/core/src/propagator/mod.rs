//! Exact linear evolution and the dispersive measurements built on it.
//!
//! The linear system `∂_t W = c·M(ξ)W` is solved in mode coordinates, where
//! `U_{μΛ}(t) = e^{iμtcΛ_{cε}}U_{μΛ}(0)`. Scalar experiments (decay, Strichartz)
//! skip the mode transform and apply `e^{itcΛ}` to a single spectral field.

mod decay;
mod kernel;
mod optimal;
mod strichartz;

pub use decay::{measure_decay, DecayReport};
pub use kernel::{kernel_quadrature, localized_measure};
pub use optimal::{optimal_decay, optimal_decay_direct, optimal_lower_bound, OptimalDecay};
pub use strichartz::{strichartz_bound, strichartz_norm, time_rule, StrichartzReport};

use rayon::prelude::*;

use crate::dispersion::{dist_rz, sigma_omega, Branch, BranchTag};
use crate::error::{invalid, Result};
use crate::grid::SpectralGrid;
use crate::modes::Frames;
use crate::params::PhysParams;
use crate::state::StateW;
use crate::C64;

/// Linear flow on a fixed grid, with the mode frames cached.
#[derive(Debug, Clone)]
pub struct Propagator {
    params: PhysParams,
    frames: Frames,
}

impl Propagator {
    pub fn new(grid: &SpectralGrid, params: PhysParams) -> Result<Self> {
        Ok(Propagator { params, frames: Frames::new(grid, params.kappa())? })
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn frames(&self) -> &Frames {
        &self.frames
    }

    pub fn evolve(&self, w: &StateW, t: f64) -> Result<StateW> {
        let mut out = w.clone();
        self.evolve_in_place(&mut out, t)?;
        Ok(out)
    }

    /// `W ← e^{tcM}W`.
    pub fn evolve_in_place(&self, w: &mut StateW, t: f64) -> Result<()> {
        if !t.is_finite() {
            return invalid(format!("evolution time must be finite, got {t}"));
        }
        if w.len() != self.frames.len() {
            return Err(crate::Error::Shape { expected: self.frames.len(), got: w.len() });
        }
        if t == 0.0 {
            return Ok(());
        }
        let ct = self.params.c * t;
        let (s0, c0) = (t * self.params.rotation()).sin_cos();
        let StateW { rho, u: [u1, u2, u3] } = w;
        rho.par_iter_mut()
            .zip(u1.par_iter_mut())
            .zip(u2.par_iter_mut())
            .zip(u3.par_iter_mut())
            .enumerate()
            .with_min_len(1024)
            .for_each(|(i, (((r, a), b), z))| match self.frames.get(i) {
                Some(f) => {
                    let mut m = f.analyze([*r, *a, *b, *z]);
                    let eo = C64::from_polar(1.0, ct * f.omega);
                    let es = C64::from_polar(1.0, ct * f.sigma);
                    m[0] *= eo;
                    m[1] *= eo.conj();
                    m[2] *= es;
                    m[3] *= es.conj();
                    [*r, *a, *b, *z] = f.synthesize(m);
                }
                None => {
                    // ∂_t u_h = −ε⁻¹ e₃×u_h
                    let (x, y) = (*a, *b);
                    *a = c0 * x + s0 * y;
                    *b = c0 * y - s0 * x;
                }
            });
        Ok(())
    }
}

/// `W(t)` for the linearized system.
pub fn evolve_linear(grid: &SpectralGrid, w0: &StateW, params: &PhysParams, t: f64) -> Result<StateW> {
    grid.check(w0.len())?;
    Propagator::new(grid, *params)?.evolve(w0, t)
}

/// Angular frequency of the scalar flow `e^{itω(ξ)}` at one wavenumber:
/// `μcΛ_{cε}` for `Σ`, `Ω` and `με⁻¹ξ₃/|ξ|` for the incompressible branch.
pub fn frequency(xi: [f64; 3], branch: Branch, params: &PhysParams) -> f64 {
    let r = xi[0].hypot(xi[1]);
    let z = xi[2];
    let mu = branch.mu();
    match branch.tag {
        BranchTag::Sigma => mu * params.c * sigma_omega(r, z, params.inv_kappa()).0,
        BranchTag::Omega => mu * params.c * sigma_omega(r, z, params.inv_kappa()).1,
        BranchTag::OmegaInc => {
            let a = r.hypot(z);
            if a == 0.0 {
                0.0
            } else {
                mu * params.rotation() * z / a
            }
        }
    }
}

/// `|∇ω(ξ)|`, the group speed of the scalar flow.
pub fn group_speed(xi: [f64; 3], branch: Branch, params: &PhysParams) -> f64 {
    let r = xi[0].hypot(xi[1]);
    let z = xi[2];
    let inv = params.inv_kappa();
    match branch.tag {
        BranchTag::OmegaInc => {
            let a2 = r * r + z * z;
            if a2 == 0.0 {
                0.0
            } else {
                params.rotation() * r / a2
            }
        }
        tag => {
            let (d1, d2) = dist_rz(r, z, inv);
            if d1 == 0.0 || d2 == 0.0 {
                return f64::INFINITY;
            }
            let (s, o) = sigma_omega(r, z, inv);
            let (a, b) = ((z - inv) / d1, (z + inv) / d2);
            let (gr, gz) =
                if tag == BranchTag::Sigma { (r * s / (d1 * d2), 0.5 * (a + b)) } else { (-r * o / (d1 * d2), 0.5 * (b - a)) };
            params.c * gr.hypot(gz)
        }
    }
}

/// `ω(ξ)` at every grid frequency.
pub fn frequency_table(grid: &SpectralGrid, branch: Branch, params: &PhysParams) -> Vec<f64> {
    grid.map_freq(|_, xi| frequency(xi, branch, params))
}

/// Physical field of `e^{itω}f̂`.
pub fn evolve_scalar(grid: &SpectralGrid, fh: &[C64], omega: &[f64], t: f64) -> Result<Vec<C64>> {
    grid.check(fh.len())?;
    grid.check(omega.len())?;
    let mut data: Vec<C64> = fh.par_iter().zip(omega.par_iter()).map(|(f, w)| f * C64::from_polar(1.0, w * t)).collect();
    grid.inverse_inplace(&mut data, &mut Vec::new());
    Ok(data)
}

/// Least-squares line `y = a·x + b`; returns `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let a = sxy / sxx;
    (a, my - a * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::modes::{to_modes, ModeSet};
    use crate::norms;
    use crate::random;
    use std::f64::consts::PI;

    fn params(c: f64, eps: f64) -> PhysParams {
        PhysParams::new(c, eps, 1.0 / 3.0).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let g = build_grid(16, 2.0 * PI, 1.0).unwrap();
        let w = random::state(&g, 1).unwrap();
        assert_eq!(evolve_linear(&g, &w, &params(1.0, 1.0), 0.0).unwrap(), w);
        assert!(evolve_linear(&g, &w, &params(1.0, 1.0), f64::NAN).is_err());
    }

    #[test]
    fn single_sigma_mode_rotates_at_sigma() {
        // L = 3π puts ξ₀ = (0, 0, 2) on an unshifted grid and keeps κ⁻¹ = 1 off it
        let g = build_grid(8, 3.0 * PI, 1.0).unwrap();
        assert!(!g.is_shifted());
        let idx = 3;
        assert_eq!(g.freq(idx), [0.0, 0.0, 2.0]);
        let p = Propagator::new(&g, params(1.0, 1.0)).unwrap();
        let f = p.frames().get(idx).unwrap();
        for (slot, tau) in [(2, 2.0), (0, 1.0)] {
            let mut u = [C64::new(0.0, 0.0); 4];
            u[slot] = C64::new(1.0, 0.0);
            let mut w = StateW::zeros(g.len());
            [w.rho[idx], w.u[0][idx], w.u[1][idx], w.u[2][idx]] = f.synthesize(u);
            for t in [0.3, 1.0, 7.5] {
                let wt = p.evolve(&w, t).unwrap();
                let e = C64::from_polar(1.0, tau * t);
                for (a, b) in wt.at(idx).iter().zip(w.at(idx)) {
                    assert!((a - e * b).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn isometry_and_group_property() {
        let g = build_grid(16, 2.0 * PI * 1.05, 1.0).unwrap();
        let p = Propagator::new(&g, params(2.0, 0.5)).unwrap();
        let w = random::state(&g, 2).unwrap();
        let n0 = norms::state(&g, &w, 0.0).unwrap();
        for t in [1.0, 10.0, 100.0] {
            let wt = p.evolve(&w, t).unwrap();
            assert!((norms::state(&g, &wt, 0.0).unwrap() / n0 - 1.0).abs() < 1e-12);
        }
        let a = p.evolve(&p.evolve(&w, 0.7).unwrap(), 2.4).unwrap();
        let b = p.evolve(&w, 3.1).unwrap();
        assert!(a.max_rel_diff(&b) < 1e-12);
        let back = p.evolve(&b, -3.1).unwrap();
        assert!(back.max_rel_diff(&w) < 1e-12);
    }

    #[test]
    fn modes_rotate_pointwise() {
        let g = build_grid(16, 2.0 * PI, 1.0).unwrap();
        let pp = params(1.5, 2.0);
        let p = Propagator::new(&g, pp).unwrap();
        let w = random::state(&g, 3).unwrap();
        let t = 2.7;
        let m0 = to_modes(&g, &w, pp.kappa()).unwrap();
        let mt = to_modes(&g, &p.evolve(&w, t).unwrap(), pp.kappa()).unwrap();
        for b in [Branch::OMEGA, Branch::OMEGA_MINUS, Branch::SIGMA, Branch::SIGMA_MINUS] {
            let s = ModeSet::slot(b).unwrap();
            for i in 0..g.len() {
                let e = C64::from_polar(1.0, t * frequency(g.freq(i), b, &pp));
                assert!((mt.amp[s][i] - e * m0.amp[s][i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn time_derivative_is_diagonal() {
        // difference quotient of U_{μΛ} against iμcΛU_{μΛ}
        let g = build_grid(16, 2.0 * PI, 1.0).unwrap();
        let pp = params(1.0, 1.0);
        let p = Propagator::new(&g, pp).unwrap();
        let w = random::state(&g, 4).unwrap();
        let h = 1e-4;
        let mp = to_modes(&g, &p.evolve(&w, h).unwrap(), 1.0).unwrap();
        let mm = to_modes(&g, &p.evolve(&w, -h).unwrap(), 1.0).unwrap();
        let m0 = to_modes(&g, &w, 1.0).unwrap();
        let (mut num, mut den) = (0.0f64, 0.0f64);
        for (s, b) in [Branch::OMEGA, Branch::OMEGA_MINUS, Branch::SIGMA, Branch::SIGMA_MINUS].into_iter().enumerate() {
            for i in 0..g.len() {
                let d = (mp.amp[s][i] - mm.amp[s][i]) / (2.0 * h);
                let want = C64::new(0.0, frequency(g.freq(i), b, &pp)) * m0.amp[s][i];
                num += (d - want).norm_sqr();
                den += m0.amp[s][i].norm_sqr();
            }
        }
        assert!((num / den).sqrt() < 1e-6);
    }

    #[test]
    fn zero_mode_is_a_coriolis_rotation() {
        let g = build_grid(8, 2.0 * PI * 1.05, 1.0).unwrap();
        let pp = params(1.0, 0.25);
        let mut w = StateW::zeros(g.len());
        [w.rho[0], w.u[0][0], w.u[1][0], w.u[2][0]] = [C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.5, 0.0)];
        let t = 0.3;
        let wt = evolve_linear(&g, &w, &pp, t).unwrap();
        let (s, c) = (t / 0.25f64).sin_cos();
        assert!((wt.u[0][0].re - (2.0 * c - s)).abs() < 1e-15);
        assert!((wt.u[1][0].re - (-c - 2.0 * s)).abs() < 1e-15);
        assert_eq!(wt.rho[0], w.rho[0]);
        assert_eq!(wt.u[2][0], w.u[2][0]);
    }

    #[test]
    fn no_rotation_is_the_wave_equation() {
        let g = build_grid(8, 2.0 * PI, f64::INFINITY).unwrap();
        let pp = params(2.0, f64::INFINITY);
        let w = random::state(&g, 5).unwrap();
        let wt = evolve_linear(&g, &w, &pp, 0.4).unwrap();
        // ρ̂ of a wave: ρ̂(t) = cos(c|ξ|t)ρ̂ − i sin(c|ξ|t) ξ·û/|ξ|
        for i in 1..g.len() {
            let xi = g.freq(i);
            let a = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            let (s, c) = (2.0 * a * 0.4).sin_cos();
            let div = (xi[0] * w.u[0][i] + xi[1] * w.u[1][i] + xi[2] * w.u[2][i]) / a;
            let want = c * w.rho[i] - C64::new(0.0, s) * div;
            assert!((wt.rho[i] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn group_speed_matches_finite_differences() {
        let pp = params(1.7, 0.6);
        let mut r = random::rng(6);
        for b in [Branch::SIGMA, Branch::OMEGA, Branch::OMEGA_INC] {
            for _ in 0..200 {
                let xi = random::vec3(&mut r, -3.0, 3.0);
                let h = 1e-6;
                let g: Vec<f64> = (0..3)
                    .map(|a| {
                        let (mut p, mut m) = (xi, xi);
                        p[a] += h;
                        m[a] -= h;
                        (frequency(p, b, &pp) - frequency(m, b, &pp)) / (2.0 * h)
                    })
                    .collect();
                let fd = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
                assert!((group_speed(xi, b, &pp) - fd).abs() < 1e-6 * (1.0 + fd));
            }
        }
    }

    #[test]
    fn incompressible_limit_of_omega() {
        let eps = 0.5;
        let xi: [f64; 3] = [0.8, -0.3, 1.1];
        let a = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let w = xi[2] / (eps * a);
        let (mut xs, mut ys) = (vec![], vec![]);
        for c in [1.0, 4.0, 16.0, 64.0] {
            let om = frequency(xi, Branch::OMEGA, &params(c, eps));
            xs.push((c * eps * a).ln());
            ys.push((om / w - 1.0).abs().ln());
        }
        let (slope, _) = linear_fit(&xs, &ys);
        assert!((slope + 2.0).abs() < 0.1, "{slope}");
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (a, b) = linear_fit(&xs, &ys);
        assert!((a - 2.5).abs() < 1e-14 && (b + 1.0).abs() < 1e-14);
    }
}
