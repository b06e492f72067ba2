use std::cell::RefCell;
use std::f64::consts::PI;

use crate::dispersion::{sigma_omega, Branch, BranchTag};
use crate::error::{invalid, Error, Result};
use crate::localization::{symbol_unchecked, AxisLoc, LocSpec};
use crate::quadrature::{adaptive, bessel_j0};
use crate::C64;

const MAX_PIECES: usize = 4000;

type Intervals = Vec<(f64, f64)>;

/// `K(t, x) = ∫ e^{i(tμΛ_κ(ξ) + x·ξ)} φ_loc(ξ) dξ`, reduced by axisymmetry to
/// `2π∫∫ e^{i(tμΛ + x₃z)} J₀(|x_h|r) φ_loc(r, z) r dr dz` and integrated
/// adaptively (outer `r`, inner `z`) to absolute tolerance `1e−8·∫φ_loc`.
///
/// Units are `c = 1`, so `ε = κ` and the incompressible branch is `κ⁻¹z/|ξ|`.
pub fn kernel_quadrature(loc: &LocSpec, branch: Branch, kappa: f64, t: f64, x: [f64; 3]) -> Result<C64> {
    if !(t.is_finite() && t >= 0.0) {
        return invalid(format!("kernel time must be finite and non-negative, got {t}"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return invalid("kernel position must be finite");
    }
    let tol = 1e-8 * localized_measure(loc, kappa)?;
    integrate(loc, branch, kappa, t, x, tol)
}

/// `∫φ_loc dξ`.
pub fn localized_measure(loc: &LocSpec, kappa: f64) -> Result<f64> {
    loc.validate()?;
    if !(kappa > 0.0) {
        return invalid(format!("kappa must be positive, got {kappa}"));
    }
    let rough = integrate(loc, Branch::SIGMA, kappa, 0.0, [0.0; 3], 1e-6 * loc.outer_radius().powi(3))?.re;
    Ok(integrate(loc, Branch::SIGMA, kappa, 0.0, [0.0; 3], 1e-13 * rough)?.re)
}

fn integrate(loc: &LocSpec, branch: Branch, kappa: f64, t: f64, x: [f64; 3], tol: f64) -> Result<C64> {
    loc.validate()?;
    let inv = 1.0 / kappa;
    let rho = x[0].hypot(x[1]);
    let mu = branch.mu();
    let lam = move |r: f64, z: f64| -> f64 {
        let (s, o) = sigma_omega(r, z, inv);
        mu * match branch.tag {
            BranchTag::Sigma => s,
            BranchTag::Omega => o,
            BranchTag::OmegaInc => {
                let a = r.hypot(z);
                if a == 0.0 {
                    0.0
                } else {
                    inv * z / a
                }
            }
        }
    };

    let (r_lo, r_hi) = r_range(loc);
    let inner_tol = 0.1 * tol / (2.0 * PI * r_hi * (r_hi - r_lo));
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let outer = |r: f64| -> C64 {
        if failure.borrow().is_some() {
            return C64::new(0.0, 0.0);
        }
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in z_intervals(loc, r, inv) {
            let g = |z: f64| {
                let s = symbol_unchecked(loc, [r, 0.0, z], inv);
                if s == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    C64::from_polar(s, t * lam(r, z) + x[2] * z)
                }
            };
            match adaptive(g, a, b, inner_tol, MAX_PIECES) {
                Ok(v) => acc += v,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    return C64::new(0.0, 0.0);
                }
            }
        }
        acc * (2.0 * PI * r * bessel_j0(rho * r))
    };
    let val = adaptive(outer, r_lo, r_hi, tol, MAX_PIECES);
    if let Some(e) = failure.into_inner() {
        return Err(Error::Numerical(format!("kernel inner integral: {e}")));
    }
    val.map_err(|e| Error::Numerical(format!("kernel outer integral: {e}")))
}

fn r_range(loc: &LocSpec) -> (f64, f64) {
    let s = 2f64.powi(loc.k);
    match loc.p {
        Some(p) => (s * 2f64.powi(p), 4.0 * s * 2f64.powi(p)),
        None => (0.0, 4.0 * s),
    }
}

/// Heights where `φ_loc(r, ·)` can be nonzero, split at `κ⁻¹`.
fn z_intervals(loc: &LocSpec, r: f64, inv: f64) -> Intervals {
    let s = 2f64.powi(loc.k);
    let lo = (s * s - r * r).max(0.0).sqrt();
    let hi = (16.0 * s * s - r * r).max(0.0).sqrt();
    let mut set = symmetric(lo, hi, 0.0);
    if let Some(q) = loc.q {
        let h = s * 2f64.powi(q);
        set = intersect(&set, &symmetric(h, 4.0 * h, 0.0));
    }
    match loc.l {
        AxisLoc::None => {}
        AxisLoc::L(l) => {
            let h = s * 2f64.powi(l);
            set = intersect(&set, &symmetric(h, 4.0 * h, inv));
        }
        AxisLoc::AtMostP => {
            let h = s * 2f64.powi(loc.p.unwrap_or(0));
            set = intersect(&set, &[(inv - 2.0 * h, inv + 2.0 * h)]);
        }
    }
    let mut out = Intervals::new();
    for (a, b) in set {
        if a < inv && inv < b {
            out.push((a, inv));
            out.push((inv, b));
        } else if b > a {
            out.push((a, b));
        }
    }
    out
}

/// `{z : lo ≤ |z − c| ≤ hi}`.
fn symmetric(lo: f64, hi: f64, c: f64) -> Intervals {
    if hi <= lo {
        return vec![];
    }
    if lo == 0.0 {
        vec![(c - hi, c + hi)]
    } else {
        vec![(c - hi, c - lo), (c + lo, c + hi)]
    }
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Intervals {
    let mut out = vec![];
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}
