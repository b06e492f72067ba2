//! Pseudo-spectral solver for the full system
//!
//! ```text
//! ρ_t = −c div u − (u·∇ρ + αρ div u)
//! u_t = −ε⁻¹e₃×u − c∇ρ − (u·∇u + αρ∇ρ)
//! ```
//!
//! The linear part is integrated exactly by [`Propagator`]; the quadratic rest
//! by classical RK4 in the interaction picture (Lawson's scheme). Products are
//! formed on the physical grid and truncated by the 2/3 rule.

mod energy;
mod run;

pub use energy::energy_physical;
pub use run::{
    gronwall_check, lifespan_sweep, simulate, GronwallFit, LifespanRow, Sample, SiderisData, Termination, Trajectory,
};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::SpectralGrid;
use crate::params::PhysParams;
use crate::propagator::Propagator;
use crate::state::StateW;
use crate::C64;

/// Gradient bound that ends a run as blow-up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Absolute(f64),
    /// Multiple of the initial `‖(∇ρ, ∇u)‖_{L∞}`.
    Relative(f64),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub params: PhysParams,
    pub grid: SpectralGrid,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub s_monitor: f64,
    pub blowup_threshold: Threshold,
    pub cfl_safety: f64,
    /// Largest tolerated energy fraction in the outer sixth of retained modes.
    pub tail_limit: f64,
    /// `false` drops the quadratic terms, leaving the exact linear flow.
    pub nonlinear: bool,
}

impl SolverConfig {
    /// Defaults: dealiased, `s = 3`, blow-up at 50× the initial gradient,
    /// `cfl_safety = 0.9`, and the largest admissible `dt`.
    pub fn new(params: PhysParams, grid: SpectralGrid, t_end: f64) -> Self {
        let mut cfg = SolverConfig {
            params,
            grid,
            dt: 0.0,
            t_end,
            dealias: true,
            s_monitor: 3.0,
            blowup_threshold: Threshold::Relative(50.0),
            cfl_safety: 0.9,
            tail_limit: 0.01,
            nonlinear: true,
        };
        cfg.dt = cfg.max_dt();
        cfg
    }

    /// Largest retained `|ξ|`.
    pub fn k_max(&self) -> f64 {
        let g = &self.grid;
        let ax = |a: usize| g.axis_k(a).iter().enumerate().filter(|(i, _)| self.keeps(a, *i)).fold(0.0f64, |m, (_, k)| m.max(k.abs()));
        (0..3).map(|a| ax(a).powi(2)).sum::<f64>().sqrt()
    }

    /// `cfl_safety / (c·k_max + ε⁻¹)`.
    pub fn max_dt(&self) -> f64 {
        self.cfl_safety / (self.params.c * self.k_max() + self.params.rotation())
    }

    fn keeps(&self, axis: usize, i: usize) -> bool {
        let g = &self.grid;
        if self.dealias {
            g.axis_k(axis)[i].abs() <= 2.0 * std::f64::consts::PI / g.box_len() * (g.n() as f64 / 3.0)
        } else {
            !g.is_nyquist(axis, i)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_shifted() {
            // half-integer wavenumbers are antiperiodic and products of them are not
            return invalid("the nonlinear solver needs an unshifted grid; pick a box length that avoids (0, 0, ±κ⁻¹)");
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return invalid(format!("t_end must be finite and non-negative, got {}", self.t_end));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety.is_finite()) {
            return invalid("cfl_safety must be positive");
        }
        if !(self.dt > 0.0 && self.dt <= self.max_dt() * (1.0 + 1e-12)) {
            return invalid(format!("dt = {} violates the CFL limit {}", self.dt, self.max_dt()));
        }
        if !(self.s_monitor >= 0.0) {
            return invalid("s_monitor must be non-negative");
        }
        match self.blowup_threshold {
            Threshold::Absolute(v) | Threshold::Relative(v) if v > 0.0 => {}
            _ => return invalid("blow-up threshold must be positive"),
        }
        if !(self.tail_limit > 0.0) {
            return invalid("tail_limit must be positive");
        }
        Ok(())
    }
}

/// Point values gathered while forming the nonlinear term.
#[derive(Debug, Clone, Copy)]
pub struct Pointwise {
    /// `max_x (|∇ρ|² + Σ|∂_j u_i|²)^{1/2}`
    pub grad_sup: f64,
    pub energy: Option<f64>,
    pub min_sound_speed: f64,
    pub finite: bool,
}

/// Integrator bound to one configuration.
#[derive(Debug, Clone)]
pub struct Solver {
    cfg: SolverConfig,
    prop: Propagator,
    mask: Vec<bool>,
    neg: Vec<usize>,
    freq: Vec<[f64; 3]>,
}

/// Physical fields in the order `ρ, u₁, u₂, u₃, ∂ρ (3), ∂_j u_i (9, row-major)`.
const FIELDS: usize = 16;

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let g = &cfg.grid;
        let prop = Propagator::new(g, cfg.params)?;
        let mask = (0..g.len())
            .map(|idx| {
                let (a, b, c) = g.split(idx);
                cfg.keeps(0, a) && cfg.keeps(1, b) && cfg.keeps(2, c)
            })
            .collect();
        let neg = (0..g.len()).map(|i| g.neg_index(i)).collect();
        let freq = g.map_freq(|_, xi| xi);
        Ok(Solver { cfg, prop, mask, neg, freq })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.cfg.grid
    }

    pub fn propagator(&self) -> &Propagator {
        &self.prop
    }

    /// Zero every coefficient outside the retained set.
    pub fn dealias(&self, w: &mut StateW) {
        for c in w.components_mut() {
            c.par_iter_mut().zip(self.mask.par_iter()).for_each(|(x, &keep)| {
                if !keep {
                    *x = C64::new(0.0, 0.0);
                }
            });
        }
    }

    /// Energy fraction in retained modes beyond 5/6 of the cutoff along some axis.
    pub fn tail_fraction(&self, w: &StateW) -> f64 {
        let g = self.grid();
        let kc = (0..3)
            .map(|a| g.axis_k(a).iter().enumerate().filter(|(i, _)| self.cfg.keeps(a, *i)).fold(0.0f64, |m, (_, k)| m.max(k.abs())))
            .fold(f64::INFINITY, f64::min);
        let outer = |idx: usize| {
            let (a, b, c) = g.split(idx);
            [g.axis_k(0)[a], g.axis_k(1)[b], g.axis_k(2)[c]].iter().any(|k| k.abs() > 5.0 / 6.0 * kc)
        };
        let (mut tail, mut total) = (0.0, 0.0);
        for c in w.components() {
            total += crate::par::sum(c.len(), |i| if self.mask[i] { c[i].norm_sqr() } else { 0.0 });
            tail += crate::par::sum(c.len(), |i| if self.mask[i] && outer(i) { c[i].norm_sqr() } else { 0.0 });
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Quadratic part of the tendency and the point diagnostics of `w`.
    pub fn nonlinear_term(&self, w: &StateW) -> Result<(StateW, Pointwise)> {
        self.evaluate(w, true)
    }

    fn evaluate(&self, w: &StateW, with_energy: bool) -> Result<(StateW, Pointwise)> {
        let g = self.grid();
        g.check(w.len())?;
        let len = g.len();
        let comps = w.components();
        // spectral source of physical field f: component and derivative axis
        let source = |f: usize| -> (usize, Option<usize>) {
            match f {
                0..=3 => (f, None),
                4..=6 => (0, Some(f - 4)),
                _ => (1 + (f - 7) / 3, Some((f - 7) % 3)),
            }
        };
        let spec = |f: usize, idx: usize| -> C64 {
            let (c, d) = source(f);
            let v = comps[c][idx];
            match d {
                None => v,
                Some(a) => {
                    let k = self.freq[idx][a];
                    C64::new(-k * v.im, k * v.re)
                }
            }
        };
        // two real fields per complex transform
        let mut phys: Vec<Vec<C64>> = (0..FIELDS / 2)
            .into_par_iter()
            .map(|p| {
                let mut buf: Vec<C64> = (0..len)
                    .map(|i| {
                        if self.mask[i] {
                            let (a, b) = (spec(2 * p, i), spec(2 * p + 1, i));
                            C64::new(a.re - b.im, a.im + b.re)
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                g.inverse_inplace(&mut buf, &mut Vec::new());
                buf
            })
            .collect();
        let field = |phys: &Vec<Vec<C64>>, f: usize, i: usize| -> f64 {
            let z = phys[f / 2][i];
            if f % 2 == 0 {
                z.re
            } else {
                z.im
            }
        };

        let p = &self.cfg.params;
        let (c, alpha) = (p.c, p.alpha);
        let on = self.cfg.nonlinear;
        let dv = g.cell_volume();
        const CH: usize = 4096;
        let per_chunk: Vec<(Vec<C64>, Vec<C64>, f64, f64, f64, bool)> = (0..len.div_ceil(CH))
            .into_par_iter()
            .map(|ch| {
                let lo = ch * CH;
                let hi = (lo + CH).min(len);
                let (mut z0, mut z1) = (Vec::with_capacity(hi - lo), Vec::with_capacity(hi - lo));
                let (mut gs, mut en, mut smin, mut fin) = (0.0f64, 0.0f64, f64::INFINITY, true);
                for i in lo..hi {
                    let v: [f64; FIELDS] = std::array::from_fn(|f| field(&phys, f, i));
                    let rho = v[0];
                    let u = [v[1], v[2], v[3]];
                    let drho = [v[4], v[5], v[6]];
                    let du = |comp: usize, ax: usize| v[7 + 3 * comp + ax];
                    let div = du(0, 0) + du(1, 1) + du(2, 2);
                    let mut g2 = drho[0] * drho[0] + drho[1] * drho[1] + drho[2] * drho[2];
                    for x in &v[7..] {
                        g2 += x * x;
                    }
                    gs = gs.max(g2.sqrt());
                    fin &= v.iter().all(|x| x.is_finite());
                    smin = smin.min(c + alpha * rho);
                    if with_energy {
                        en += energy::density(rho, u, p);
                    }
                    if on {
                        let nr = -(u[0] * drho[0] + u[1] * drho[1] + u[2] * drho[2] + alpha * rho * div);
                        let nu: [f64; 3] = std::array::from_fn(|k| {
                            -(u[0] * du(k, 0) + u[1] * du(k, 1) + u[2] * du(k, 2) + alpha * rho * drho[k])
                        });
                        z0.push(C64::new(nr, nu[0]));
                        z1.push(C64::new(nu[1], nu[2]));
                    } else {
                        z0.push(C64::new(0.0, 0.0));
                        z1.push(C64::new(0.0, 0.0));
                    }
                }
                (z0, z1, gs, en, smin, fin)
            })
            .collect();
        phys.clear();

        let mut diag = Pointwise { grad_sup: 0.0, energy: Some(0.0), min_sound_speed: f64::INFINITY, finite: true };
        let (mut z0, mut z1) = (Vec::with_capacity(len), Vec::with_capacity(len));
        let mut en = 0.0;
        for (a, b, gs, e, s, f) in per_chunk {
            z0.extend(a);
            z1.extend(b);
            diag.grad_sup = diag.grad_sup.max(gs);
            en += e;
            diag.min_sound_speed = diag.min_sound_speed.min(s);
            diag.finite &= f;
        }
        diag.energy = if diag.min_sound_speed > 0.0 && en.is_finite() { Some(en * dv) } else { None };
        if !with_energy && diag.energy.is_some() {
            diag.energy = Some(f64::NAN);
        }
        if !diag.finite {
            return Err(Error::Numerical("non-finite field in the nonlinear term".into()));
        }
        let mut out = StateW::zeros(len);
        if on {
            let mut scratch = Vec::new();
            g.forward_inplace(&mut z0, &mut scratch);
            g.forward_inplace(&mut z1, &mut scratch);
            let [o0, o1, o2, o3] = out.components_mut();
            self.unpack(&z0, o0, o1);
            self.unpack(&z1, o2, o3);
        }
        Ok((out, diag))
    }

    /// Split the transform of `a + ib` (both real) into `â` and `b̂`.
    fn unpack(&self, z: &[C64], a: &mut [C64], b: &mut [C64]) {
        a.par_iter_mut().zip(b.par_iter_mut()).enumerate().for_each(|(i, (x, y))| {
            if self.mask[i] {
                let (p, q) = (z[i], z[self.neg[i]].conj());
                *x = 0.5 * (p + q);
                let d = 0.5 * (p - q);
                *y = C64::new(d.im, -d.re);
            }
        });
    }

    /// Full tendency, linear part included.
    pub fn rhs(&self, w: &StateW) -> Result<StateW> {
        let (mut out, _) = self.nonlinear_term(w)?;
        let p = &self.cfg.params;
        let (c, f) = (p.c, p.rotation());
        let lin = w.map_freq(|i, [r, a, b, z]| {
            let xi = self.freq[i];
            let ix = |k: f64, v: C64| C64::new(-k * v.im, k * v.re);
            let div = ix(xi[0], a) + ix(xi[1], b) + ix(xi[2], z);
            [-c * div, -c * ix(xi[0], r) + f * b, -c * ix(xi[1], r) - f * a, -c * ix(xi[2], r)]
        });
        out.axpy(1.0, &lin);
        self.dealias(&mut out);
        Ok(out)
    }

    /// One Lawson RK4 step of size `dt`.
    pub fn step(&self, w: &StateW, dt: f64) -> Result<StateW> {
        let (k1, _) = self.nonlinear_term(w)?;
        self.step_from(w, &k1, dt)
    }

    /// Step with the first stage already evaluated.
    pub(crate) fn step_from(&self, w: &StateW, k1: &StateW, dt: f64) -> Result<StateW> {
        if !(dt > 0.0 && dt <= self.cfg.max_dt() * (1.0 + 1e-12)) {
            return invalid(format!("dt = {dt} violates the CFL limit {}", self.cfg.max_dt()));
        }
        let h = dt;
        let e = |x: &mut StateW| self.prop.evolve_in_place(x, 0.5 * h);
        let mut a = w.clone();
        a.axpy(0.5 * h, k1);
        e(&mut a)?;
        let (k2, _) = self.evaluate(&a, false)?;

        let mut wh = w.clone();
        e(&mut wh)?;
        let mut b = wh.clone();
        b.axpy(0.5 * h, &k2);
        let (k3, _) = self.evaluate(&b, false)?;

        let mut cst = wh;
        e(&mut cst)?;
        let mut e3 = k3.clone();
        e(&mut e3)?;
        cst.axpy(h, &e3);
        let (k4, _) = self.evaluate(&cst, false)?;

        let mut out = w.clone();
        out.axpy(h / 6.0, k1);
        e(&mut out)?;
        out.axpy(h / 3.0, &k2);
        out.axpy(h / 3.0, &k3);
        e(&mut out)?;
        out.axpy(h / 6.0, &k4);
        Ok(out)
    }
}

/// Full tendency of the dealiased system.
pub fn rhs(grid: &SpectralGrid, w: &StateW, params: &PhysParams) -> Result<StateW> {
    let cfg = SolverConfig::new(*params, grid.clone(), 0.0);
    Solver::new(cfg)?.rhs(w)
}

/// One step with the configured `dt`.
pub fn step(w: &StateW, config: &SolverConfig) -> Result<StateW> {
    Solver::new(config.clone())?.step(w, config.dt)
}

#[cfg(test)]
mod tests;
