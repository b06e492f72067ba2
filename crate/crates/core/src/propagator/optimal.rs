use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::localization::psi;
use crate::params::PhysParams;
use crate::quadrature::composite_rule;
use crate::C64;

const PANELS: usize = 40;
const ORDER: usize = 20;

/// `|(e^{2itΣ}f)(0)|` for the radial bump `ĝ = ψ(4κ|ξ − κ⁻¹e₃|)` together
/// with the explicit lower bound it must exceed.
#[derive(Debug, Clone, Copy)]
pub struct OptimalDecay {
    pub t: f64,
    pub value: f64,
    pub lower_bound: f64,
    /// The complex integral whose modulus is `value`.
    pub integral: C64,
}

impl OptimalDecay {
    pub fn holds(&self) -> bool {
        self.value >= self.lower_bound
    }
}

fn check(params: &PhysParams, t: f64) -> Result<(f64, f64)> {
    let (c, kappa) = (params.c, params.kappa());
    if !kappa.is_finite() {
        return invalid("optimal decay needs rotation (finite eps)");
    }
    if !(t.is_finite() && t * c / kappa >= 1.0) {
        return invalid(format!("optimal decay needs t·c/κ ≥ 1, got t = {t}"));
    }
    Ok((c, kappa))
}

/// `2π[1/(48tcκ²) − (1/t²)(1/(2c²κ))(sin(tc/4κ) + ½sin(tc/2κ) + 1)]`.
pub fn optimal_lower_bound(params: &PhysParams, t: f64) -> f64 {
    let (c, k) = (params.c, params.kappa());
    2.0 * PI
        * (1.0 / (48.0 * t * c * k * k)
            - (1.0 / (t * t)) * (1.0 / (2.0 * c * c * k)) * ((t * c / (4.0 * k)).sin() + 0.5 * (t * c / (2.0 * k)).sin() + 1.0))
}

/// Radial integral with the angular integral in closed form. `omega` flips the
/// sign of the `e^{itcρ/2}` factor.
pub fn optimal_decay(params: &PhysParams, t: f64, omega: bool) -> Result<OptimalDecay> {
    let (c, kappa) = check(params, t)?;
    let sgn = if omega { -1.0 } else { 1.0 };
    let a = 0.5 * t * c;
    let i = C64::new(0.0, 1.0);
    let e = C64::from_polar(1.0, t * c / kappa);
    let mut acc = C64::new(0.0, 0.0);
    for (rho, w) in composite_rule(0.0, 0.5 / kappa, PANELS, ORDER) {
        let (s, co) = (a * rho).sin_cos();
        let inner = e / (i * t * c * rho) * (4.0 * i * s + 2.0 * rho * kappa * co)
            + 4.0 * kappa * e / (t * t * c * c * rho) * i * s;
        acc += w * psi(4.0 * kappa * rho) * rho * rho * C64::from_polar(1.0, sgn * a * rho) * inner;
    }
    let integral = 2.0 * PI * acc;
    if !(integral.re.is_finite() && integral.im.is_finite()) {
        return Err(Error::Numerical("optimal decay integral is not finite".into()));
    }
    Ok(OptimalDecay { t, value: integral.norm(), lower_bound: optimal_lower_bound(params, t), integral })
}

/// The same integral over `(ρ, φ)` without the closed form:
/// `2π∫∫ e^{(itc/2)(±ρ + Φ)} ψ(4κρ) ρ² sinφ dφ dρ`, `Φ = √(ρ² + 4κ⁻² + 4κ⁻¹ρ cosφ)`.
pub fn optimal_decay_direct(params: &PhysParams, t: f64, omega: bool) -> Result<C64> {
    let (c, kappa) = check(params, t)?;
    let sgn = if omega { -1.0 } else { 1.0 };
    let a = 0.5 * t * c;
    let inv = 1.0 / kappa;
    let angles = composite_rule(0.0, PI, PANELS, ORDER);
    let mut acc = C64::new(0.0, 0.0);
    for (rho, w) in composite_rule(0.0, 0.5 * inv, PANELS, ORDER) {
        let g = psi(4.0 * kappa * rho) * rho * rho;
        let mut inner = C64::new(0.0, 0.0);
        for &(ph, wp) in &angles {
            let big = (rho * rho + 4.0 * inv * inv + 4.0 * inv * rho * ph.cos()).sqrt();
            inner += wp * ph.sin() * C64::from_polar(1.0, a * (sgn * rho + big));
        }
        acc += w * g * inner;
    }
    Ok(2.0 * PI * acc)
}
