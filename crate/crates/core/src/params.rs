use crate::error::{invalid, Result};

/// Physical parameters. `eps = +∞` switches the rotation off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub c: f64,
    pub eps: f64,
    pub alpha: f64,
    kappa: f64,
}

impl PhysParams {
    pub fn new(c: f64, eps: f64, alpha: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return invalid(format!("sound speed c must be positive and finite, got {c}"));
        }
        if eps.is_nan() || eps <= 0.0 || eps == f64::NEG_INFINITY {
            return invalid(format!("Rossby parameter must be positive, got {eps}"));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return invalid(format!("pressure exponent alpha must be positive, got {alpha}"));
        }
        Ok(PhysParams { c, eps, alpha, kappa: c * eps })
    }

    /// Same `c`, `alpha`, new `eps`.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.c, eps, self.alpha)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// κ⁻¹, zero without rotation.
    pub fn inv_kappa(&self) -> f64 {
        1.0 / self.kappa
    }

    /// Coriolis coefficient ε⁻¹, zero without rotation.
    pub fn rotation(&self) -> f64 {
        1.0 / self.eps
    }

    pub fn rotating(&self) -> bool {
        self.eps.is_finite()
    }
}
