use crate::dispersion::Branch;
use crate::error::{invalid, Error, Result};
use crate::grid::SpectralGrid;
use crate::localization::{symbol_table, LocSpec};
use crate::params::PhysParams;
use crate::par;
use crate::C64;

use super::{frequency_table, group_speed, linear_fit};

/// Fraction of `Σ|f̂|²` allowed in the two outermost `|m|` layers.
const BAND_TOL: f64 = 1e-20;
/// Coefficients below this fraction of the peak count as outside the support.
const SUPPORT_TOL: f64 = 1e-12;

/// Sup-norms of `e^{itω}P_loc f` and a power-law fit `sup ≈ coeff·t^exponent`.
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub fitted_exponent: f64,
    /// `exp` of the fitted intercept.
    pub fitted_coeff: f64,
    pub window: (f64, f64),
    pub loc: LocSpec,
    pub branch: Branch,
    /// Largest group speed on the support of the localized data.
    pub max_speed: f64,
}

impl DecayReport {
    pub fn window_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (a, b) = self.window;
        self.times.iter().zip(&self.sup_norms).map(|(&t, &s)| (t, s)).filter(move |(t, _)| *t >= a && *t <= b)
    }
}

/// Evolve `P_loc f̂` by the scalar flow of `branch` and fit the decay of its
/// sup-norm over `window`.
///
/// The grid has to hold the localized data with room to spare and the fastest
/// wave packet must not reach half the box by `max(times)`; both are checked.
pub fn measure_decay(
    grid: &SpectralGrid,
    f_hat: &[C64],
    loc: &LocSpec,
    branch: Branch,
    params: &PhysParams,
    times: &[f64],
    window: (f64, f64),
) -> Result<DecayReport> {
    grid.check(f_hat.len())?;
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return invalid("sample times must be finite and non-negative");
    }
    let (t0, t1) = window;
    let tmin = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let tmax = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(t0 > 0.0 && t0 < t1 && t0 >= tmin && t1 <= tmax) {
        return invalid(format!("fit window [{t0}, {t1}] must lie inside the sampled times with 0 < t0 < t1"));
    }
    let in_window = times.iter().filter(|t| **t >= t0 && **t <= t1).count();
    if in_window < 8 {
        return invalid(format!("fit window holds {in_window} samples, need at least 8"));
    }

    let sym = symbol_table(grid, loc, params.kappa())?;
    let fl: Vec<C64> = f_hat.iter().zip(&sym).map(|(f, s)| f * s).collect();
    check_band_limited(grid, &fl)?;

    let peak = par::max(fl.len(), |i| fl[i].norm());
    if peak == 0.0 {
        return invalid("localized data vanish on this grid");
    }
    let max_speed = par::max(fl.len(), |i| {
        if fl[i].norm() > SUPPORT_TOL * peak {
            group_speed(grid.freq(i), branch, params)
        } else {
            0.0
        }
    });
    if !(max_speed * tmax < 0.5 * grid.box_len()) {
        return Err(Error::Invalid(format!(
            "wrap-around: group speed {max_speed:.4} times t = {tmax} exceeds half the box {}",
            0.5 * grid.box_len()
        )));
    }

    let omega = frequency_table(grid, branch, params);
    let mut buf = vec![C64::new(0.0, 0.0); fl.len()];
    let mut scratch = Vec::new();
    let mut sup_norms = Vec::with_capacity(times.len());
    for &t in times {
        buf.iter_mut().zip(fl.iter().zip(&omega)).for_each(|(b, (f, w))| *b = f * C64::from_polar(1.0, w * t));
        grid.inverse_inplace(&mut buf, &mut scratch);
        sup_norms.push(par::max(buf.len(), |i| buf[i].norm()));
    }

    let (xs, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&sup_norms)
        .filter(|(t, _)| **t >= t0 && **t <= t1)
        .map(|(t, s)| (t.ln(), s.ln()))
        .unzip();
    let (slope, icpt) = linear_fit(&xs, &ys);
    if !slope.is_finite() {
        return Err(Error::Numerical("decay fit is not finite".into()));
    }
    Ok(DecayReport {
        times: times.to_vec(),
        sup_norms,
        fitted_exponent: slope,
        fitted_coeff: icpt.exp(),
        window,
        loc: *loc,
        branch,
        max_speed,
    })
}

/// The two outermost layers in every direction must carry no energy, or the
/// evolution aliases.
fn check_band_limited(grid: &SpectralGrid, fl: &[C64]) -> Result<()> {
    let n = grid.n() as i64;
    let edge = |i: usize| grid.mode(i).abs() >= n / 2 - 1;
    let total = par::sum(fl.len(), |i| fl[i].norm_sqr());
    let outer = par::sum(fl.len(), |idx| {
        let (a, b, c) = grid.split(idx);
        if edge(a) || edge(b) || edge(c) {
            fl[idx].norm_sqr()
        } else {
            0.0
        }
    });
    if outer > BAND_TOL * total {
        return invalid(format!("localized data reach the grid edge (outer energy fraction {:.2e})", outer / total));
    }
    Ok(())
}
