//! Smooth Littlewood–Paley cutoffs and the anisotropic projectors built from
//! them. `ψ` is one on `[−1, 1]` and vanishes outside `[−2, 2]`;
//! `φ(x) = ψ(x/2) − ψ(x)` lives on `1 ≤ |x| ≤ 4`.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::grid::SpectralGrid;
use crate::C64;

/// `e^{−1/t} / (e^{−1/t} + e^{−1/(1−t)})`, clipped to `[0, 1]` outside `(0, 1)`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        // divide through by e^{−1/t} so nothing underflows to 0/0
        1.0 / (1.0 + (1.0 / t - 1.0 / (1.0 - t)).exp())
    }
}

pub fn psi(x: f64) -> f64 {
    smooth_step(2.0 - x.abs())
}

pub fn phi(x: f64) -> f64 {
    psi(0.5 * x) - psi(x)
}

/// The optional localization relative to the singular height `ξ₃ = κ⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisLoc {
    None,
    /// `φ(2^{−k−l}(ξ₃ − κ⁻¹))`
    L(i32),
    /// `ψ(2^{−k−p}(ξ₃ − κ⁻¹))`
    AtMostP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocSpec {
    pub k: i32,
    pub p: Option<i32>,
    pub q: Option<i32>,
    pub l: AxisLoc,
}

impl LocSpec {
    pub fn shell(k: i32) -> Self {
        LocSpec { k, p: None, q: None, l: AxisLoc::None }
    }

    pub fn kp(k: i32, p: i32) -> Self {
        LocSpec { k, p: Some(p), q: None, l: AxisLoc::None }
    }

    pub fn kpq(k: i32, p: i32, q: i32) -> Self {
        LocSpec { k, p: Some(p), q: Some(q), l: AxisLoc::None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.is_some_and(|p| p > 0) || self.q.is_some_and(|q| q > 0) {
            return invalid(format!("p and q must be <= 0: {self:?}"));
        }
        match (self.l, self.p) {
            (AxisLoc::None, _) => Ok(()),
            (_, None) => invalid(format!("l needs p: {self:?}")),
            (AxisLoc::L(l), Some(p)) if l < p || l > 0 => invalid(format!("need p <= l <= 0: {self:?}")),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        let mut s = format!("k={}", self.k);
        if let Some(p) = self.p {
            s += &format!(" p={p}");
        }
        if let Some(q) = self.q {
            s += &format!(" q={q}");
        }
        match self.l {
            AxisLoc::None => {}
            AxisLoc::L(l) => s += &format!(" l={l}"),
            AxisLoc::AtMostP => s += " l<=p",
        }
        s
    }

    /// Radius of a ball containing the support, `4·2^k`.
    pub fn outer_radius(&self) -> f64 {
        4.0 * 2f64.powi(self.k)
    }
}

/// Product of the cutoff factors selected by `spec`, at `ξ`. Assumes a
/// validated spec.
pub fn symbol_unchecked(spec: &LocSpec, xi: [f64; 3], inv_kappa: f64) -> f64 {
    let r = xi[0].hypot(xi[1]);
    let a = r.hypot(xi[2]);
    let s = 2f64.powi(-spec.k);
    let mut v = phi(s * a);
    if v == 0.0 {
        return 0.0;
    }
    if let Some(p) = spec.p {
        v *= phi(s * 2f64.powi(-p) * r);
    }
    if let Some(q) = spec.q {
        v *= phi(s * 2f64.powi(-q) * xi[2]);
    }
    match spec.l {
        AxisLoc::None => {}
        AxisLoc::L(l) => v *= phi(s * 2f64.powi(-l) * (xi[2] - inv_kappa)),
        AxisLoc::AtMostP => {
            let p = spec.p.unwrap_or(0);
            v *= psi(s * 2f64.powi(-p) * (xi[2] - inv_kappa));
        }
    }
    v
}

pub fn symbol(spec: &LocSpec, xi: [f64; 3], kappa: f64) -> Result<f64> {
    spec.validate()?;
    Ok(symbol_unchecked(spec, xi, 1.0 / kappa))
}

/// Symbol values at every grid frequency.
pub fn symbol_table(grid: &SpectralGrid, spec: &LocSpec, kappa: f64) -> Result<Vec<f64>> {
    spec.validate()?;
    let inv = 1.0 / kappa;
    Ok(grid.map_freq(|_, xi| symbol_unchecked(spec, xi, inv)))
}

/// Multiply spectral coefficients by the symbol.
pub fn project(grid: &SpectralGrid, field: &[C64], spec: &LocSpec, kappa: f64) -> Result<Vec<C64>> {
    grid.check(field.len())?;
    let sym = symbol_table(grid, spec, kappa)?;
    Ok(field.par_iter().zip(sym.par_iter()).map(|(f, s)| f * s).collect())
}
