use crate::dispersion::{Branch, BranchTag};
use crate::error::{invalid, Result};
use crate::grid::SpectralGrid;
use crate::localization::{symbol_table, LocSpec};
use crate::norms::{self, NormKind};
use crate::params::PhysParams;
use crate::quadrature::gauss_legendre;
use crate::C64;

use super::frequency_table;

/// Graded panels: edges `0, T/2^7, …, T/2, T`.
const PANELS: usize = 8;

#[derive(Debug, Clone)]
pub struct StrichartzReport {
    pub q: f64,
    pub r: f64,
    pub t_final: f64,
    /// Number of time nodes actually used.
    pub nt: usize,
    pub norm: f64,
    pub bound: f64,
    pub ratio: f64,
    /// `‖P_loc f‖_{L²}`.
    pub l2: f64,
    pub loc: LocSpec,
    pub branch: Branch,
}

/// Nodes and weights on `[0, T]`: Gauss–Legendre on panels that halve towards
/// `t = 0`, where the integrand is largest, with `⌈nt/8⌉` nodes each.
pub fn time_rule(t_final: f64, nt: usize) -> Vec<(f64, f64)> {
    let per = nt.div_ceil(PANELS).max(1);
    let (x, w) = gauss_legendre(per);
    let mut edges = vec![0.0];
    edges.extend((0..PANELS).rev().map(|j| t_final / 2f64.powi(j as i32)));
    let mut out = Vec::with_capacity(PANELS * per);
    for e in edges.windows(2) {
        let h = 0.5 * (e[1] - e[0]);
        out.extend(x.iter().zip(&w).map(|(xi, wi)| (e[0] + h * (xi + 1.0), h * wi)));
    }
    out
}

/// `(⟨2^k cε⟩³ε⁻²c⁻³)^{1/q}‖P_k f‖` on the inertial branch,
/// `(⟨2^k cε⟩^{7/3}2^{k/3}ε^{−5/3}c^{−8/3})^{1/q}‖P_k f‖` on the acoustic one.
pub fn strichartz_bound(params: &PhysParams, k: i32, branch: Branch, q: f64, l2: f64) -> Result<f64> {
    if !params.rotating() {
        return invalid("the Strichartz bound needs rotation (finite eps)");
    }
    let (c, eps) = (params.c, params.eps);
    let x = 2f64.powi(k) * c * eps;
    let jb = (1.0 + x * x).sqrt();
    let base = match branch.tag {
        BranchTag::Omega => jb.powi(3) / (eps * eps * c.powi(3)),
        BranchTag::Sigma => jb.powf(7.0 / 3.0) * 2f64.powf(k as f64 / 3.0) * eps.powf(-5.0 / 3.0) * c.powf(-8.0 / 3.0),
        BranchTag::OmegaInc => eps * 2f64.powi(3 * k),
    };
    Ok(if q.is_infinite() { l2 } else { base.powf(1.0 / q) * l2 })
}

fn check_admissible(q: f64, r: f64) -> Result<()> {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    if !(q >= 2.0 && r >= 2.0) || (2.0 * inv(q) + 2.0 * inv(r) - 1.0).abs() > 1e-12 {
        return invalid(format!("(q, r) = ({q}, {r}) is not admissible: need 2/q + 2/r = 1"));
    }
    if q == 2.0 && r.is_infinite() {
        return invalid("the endpoint (2, ∞) is excluded");
    }
    Ok(())
}

/// Discrete `L^q_t([0, T]; L^r_x)` norm of `e^{itω}P_loc f` and its ratio to
/// the Strichartz bound for `loc.k`.
#[allow(clippy::too_many_arguments)]
pub fn strichartz_norm(
    grid: &SpectralGrid,
    f_hat: &[C64],
    loc: &LocSpec,
    branch: Branch,
    params: &PhysParams,
    q: f64,
    r: f64,
    t_final: f64,
    nt: usize,
) -> Result<StrichartzReport> {
    grid.check(f_hat.len())?;
    check_admissible(q, r)?;
    if nt < 64 {
        return invalid(format!("need at least 64 time samples, got {nt}"));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return invalid(format!("final time must be positive, got {t_final}"));
    }
    let sym = symbol_table(grid, loc, params.kappa())?;
    let fl: Vec<C64> = f_hat.iter().zip(&sym).map(|(f, s)| f * s).collect();
    let l2 = norms::spectral(grid, &fl, NormKind::L2)?;
    let bound = strichartz_bound(params, loc.k, branch, q, l2)?;

    let omega = frequency_table(grid, branch, params);
    let rule = time_rule(t_final, nt);
    let space = if r.is_infinite() { NormKind::Sup } else { NormKind::Lebesgue(r) };
    let mut buf = vec![C64::new(0.0, 0.0); fl.len()];
    let mut scratch = Vec::new();
    let mut samples = Vec::with_capacity(rule.len());
    for &(t, w) in &rule {
        buf.iter_mut().zip(fl.iter().zip(&omega)).for_each(|(b, (f, om))| *b = f * C64::from_polar(1.0, om * t));
        grid.inverse_inplace(&mut buf, &mut scratch);
        samples.push((w, norms::physical(grid, &buf, space)?));
    }
    let norm = norms::mixed(&samples, q)?;
    Ok(StrichartzReport {
        q,
        r,
        t_final,
        nt: rule.len(),
        norm,
        bound,
        ratio: norm / bound,
        l2,
        loc: *loc,
        branch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    #[test]
    fn time_rule_is_exact_for_polynomials() {
        let rule = time_rule(10.0, 64);
        assert_eq!(rule.len(), 64);
        assert_eq!(time_rule(10.0, 65).len(), 72);
        for d in 0..16 {
            let got: f64 = rule.iter().map(|(t, w)| w * t.powi(d)).sum();
            let want = 10f64.powi(d + 1) / (d + 1) as f64;
            assert!((got / want - 1.0).abs() < 1e-13);
        }
        assert!(rule.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn admissibility() {
        assert!(check_admissible(4.0, 4.0).is_ok());
        assert!(check_admissible(f64::INFINITY, 2.0).is_ok());
        assert!(check_admissible(3.0, 6.0).is_ok());
        assert!(check_admissible(2.0, f64::INFINITY).is_err());
        assert!(check_admissible(4.0, 3.0).is_err());
        assert!(check_admissible(1.5, -6.0).is_err());
    }

    #[test]
    fn energy_pair_is_the_l2_norm() {
        let g = build_grid(32, 24.0, 1.0).unwrap();
        let p = PhysParams::new(1.0, 1.0, 1.0 / 3.0).unwrap();
        let f = vec![C64::new(1.0, 0.5); g.len()];
        let rep = strichartz_norm(&g, &f, &LocSpec::shell(0), Branch::OMEGA, &p, f64::INFINITY, 2.0, 30.0, 64).unwrap();
        assert!((rep.norm / rep.l2 - 1.0).abs() < 1e-12);
        assert!((rep.ratio - 1.0).abs() < 1e-12);
        assert!(strichartz_norm(&g, &f, &LocSpec::shell(0), Branch::OMEGA, &p, 4.0, 4.0, 30.0, 32).is_err());
    }

    #[test]
    fn bound_values() {
        let p = PhysParams::new(2.0, 0.5, 1.0 / 3.0).unwrap();
        // 2^k cε = 2, ⟨2⟩ = √5
        let om = strichartz_bound(&p, 1, Branch::OMEGA, 4.0, 3.0).unwrap();
        let want = (5f64.powf(1.5) / (0.25 * 8.0)).powf(0.25) * 3.0;
        assert!((om - want).abs() < 1e-14 * want);
        let s = strichartz_bound(&p, 1, Branch::SIGMA, 4.0, 1.0).unwrap();
        let want = (5f64.powf(7.0 / 6.0) * 2f64.powf(1.0 / 3.0) * 0.5f64.powf(-5.0 / 3.0) * 2f64.powf(-8.0 / 3.0)).powf(0.25);
        assert!((s - want).abs() < 1e-14 * want);
        assert!(strichartz_bound(&p.with_eps(f64::INFINITY).unwrap(), 0, Branch::OMEGA, 4.0, 1.0).is_err());
    }
}
