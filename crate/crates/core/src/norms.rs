//! Discrete norms. Physical quadrature uses the weight `(L/n)³`; the spectral
//! side uses Plancherel with the unnormalized forward FFT, so that
//! `‖f‖²_{L²} = (L³/n⁶) Σ|f̂|²`.

use crate::error::{invalid, Error, Result};
use crate::grid::SpectralGrid;
use crate::par;
use crate::state::StateW;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    L2,
    Sobolev(f64),
    Sup,
    Lebesgue(f64),
}

fn spectral_weight(grid: &SpectralGrid) -> f64 {
    let n = grid.len() as f64;
    grid.box_len().powi(3) / (n * n)
}

/// Norm of a physical-space field.
pub fn physical(grid: &SpectralGrid, f: &[C64], kind: NormKind) -> Result<f64> {
    grid.check(f.len())?;
    finite(f)?;
    let dv = grid.cell_volume();
    match kind {
        NormKind::L2 => Ok((par::sum(f.len(), |i| f[i].norm_sqr()) * dv).sqrt()),
        NormKind::Sup => Ok(par::max(f.len(), |i| f[i].norm())),
        NormKind::Lebesgue(p) => {
            if p.is_infinite() && p > 0.0 {
                return Ok(par::max(f.len(), |i| f[i].norm()));
            }
            if !(p >= 1.0) {
                return invalid(format!("Lebesgue exponent must be >= 1, got {p}"));
            }
            // scale out the maximum so large p cannot overflow
            let m = par::max(f.len(), |i| f[i].norm());
            if m == 0.0 {
                return Ok(0.0);
            }
            let sum = if p.fract() == 0.0 && p <= 16.0 {
                let k = p as i32;
                par::sum(f.len(), |i| (f[i].norm() / m).powi(k))
            } else {
                par::sum(f.len(), |i| (f[i].norm() / m).powf(p))
            };
            Ok(m * (sum * dv).powf(1.0 / p))
        }
        NormKind::Sobolev(s) => {
            let fh = grid.to_spectral_complex(f)?;
            spectral(grid, &fh, NormKind::Sobolev(s))
        }
    }
}

/// Norm computed from spectral coefficients; `Sup` and `Lebesgue` go through
/// the physical grid.
pub fn spectral(grid: &SpectralGrid, fh: &[C64], kind: NormKind) -> Result<f64> {
    grid.check(fh.len())?;
    finite(fh)?;
    match kind {
        NormKind::L2 => Ok((par::sum(fh.len(), |i| fh[i].norm_sqr()) * spectral_weight(grid)).sqrt()),
        NormKind::Sobolev(s) => {
            if !(s >= 0.0) {
                return invalid(format!("Sobolev index must be nonnegative, got {s}"));
            }
            let sum = par::sum(fh.len(), |i| {
                let xi = grid.freq(i);
                (1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).powf(s) * fh[i].norm_sqr()
            });
            Ok((sum * spectral_weight(grid)).sqrt())
        }
        _ => physical(grid, &grid.to_physical(fh)?, kind),
    }
}

/// Combined L² or Hˢ norm of all four components of `W`.
pub fn state(grid: &SpectralGrid, w: &StateW, s: f64) -> Result<f64> {
    grid.check(w.len())?;
    if !(s >= 0.0) {
        return invalid(format!("Sobolev index must be nonnegative, got {s}"));
    }
    let comps = w.components();
    for c in comps {
        finite(c)?;
    }
    let sum = par::sum(w.len(), |i| {
        let a: f64 = comps.iter().map(|c| c[i].norm_sqr()).sum();
        if s == 0.0 || a == 0.0 {
            return a;
        }
        let xi = grid.freq(i);
        (1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).powf(s) * a
    });
    Ok((sum * spectral_weight(grid)).sqrt())
}

/// Mixed `L^q_t L^r_x` norm from samples `(weight, ‖f(t_i)‖_{L^r})`, with the
/// weights those of a time quadrature rule.
pub fn mixed(samples: &[(f64, f64)], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return invalid("mixed norm needs at least one time sample");
    }
    if q.is_infinite() && q > 0.0 {
        return Ok(samples.iter().fold(0.0, |m, s| m.max(s.1)));
    }
    if !(q >= 1.0) {
        return invalid(format!("time exponent must be >= 1, got {q}"));
    }
    Ok(samples.iter().map(|(w, x)| w * x.powf(q)).sum::<f64>().powf(1.0 / q))
}

fn finite(f: &[C64]) -> Result<()> {
    if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite field value".into()));
    }
    Ok(())
}
