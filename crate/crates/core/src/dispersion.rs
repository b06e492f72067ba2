//! The two dispersion relations of the linearized rotating system,
//!
//! ```text
//! d₁ = |ξ − κ⁻¹e₃|,  d₂ = |ξ + κ⁻¹e₃|,  Σ = (d₂ + d₁)/2,  Ω = (d₂ − d₁)/2,
//! ```
//!
//! and the incompressible inertial relation `ω_ε = ε⁻¹ξ₃/|ξ|`. Everything here
//! is axisymmetric, so derivatives are taken in `(r, z) = (|ξ_h|, ξ₃)`.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Freq {
    pub xi: [f64; 3],
}

impl Freq {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Freq { xi: [x, y, z] }
    }

    pub fn r(&self) -> f64 {
        self.xi[0].hypot(self.xi[1])
    }

    pub fn z(&self) -> f64 {
        self.xi[2]
    }

    pub fn norm(&self) -> f64 {
        self.r().hypot(self.xi[2])
    }
}

impl From<[f64; 3]> for Freq {
    fn from(xi: [f64; 3]) -> Self {
        Freq { xi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchTag {
    Sigma,
    Omega,
    /// `ω_ε`; the parameter slot carries `ε` instead of `κ`.
    OmegaInc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Branch {
    pub tag: BranchTag,
    pub sign: i8,
}

impl Branch {
    pub const SIGMA: Branch = Branch { tag: BranchTag::Sigma, sign: 1 };
    pub const SIGMA_MINUS: Branch = Branch { tag: BranchTag::Sigma, sign: -1 };
    pub const OMEGA: Branch = Branch { tag: BranchTag::Omega, sign: 1 };
    pub const OMEGA_MINUS: Branch = Branch { tag: BranchTag::Omega, sign: -1 };
    pub const OMEGA_INC: Branch = Branch { tag: BranchTag::OmegaInc, sign: 1 };

    pub fn new(tag: BranchTag, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return invalid(format!("branch sign must be ±1, got {sign}"));
        }
        Ok(Branch { tag, sign })
    }

    pub fn mu(&self) -> f64 {
        self.sign as f64
    }

    pub fn name(&self) -> &'static str {
        match (self.tag, self.sign) {
            (BranchTag::Sigma, 1) => "+Sigma",
            (BranchTag::Sigma, _) => "-Sigma",
            (BranchTag::Omega, 1) => "+Omega",
            (BranchTag::Omega, _) => "-Omega",
            (BranchTag::OmegaInc, 1) => "+OmegaInc",
            (BranchTag::OmegaInc, _) => "-OmegaInc",
        }
    }
}

/// `(d₁, d₂)`; `d₁` is the distance to `+κ⁻¹e₃`.
pub fn distances(xi: &Freq, kappa: f64) -> (f64, f64) {
    dist_rz(xi.r(), xi.z(), 1.0 / kappa)
}

#[inline]
pub(crate) fn dist_rz(r: f64, z: f64, inv_kappa: f64) -> (f64, f64) {
    (r.hypot(z - inv_kappa), r.hypot(z + inv_kappa))
}

/// `(Σ, Ω)` at `(r, z)`. `Ω` comes from `ΣΩ = κ⁻¹z`, which avoids the
/// cancellation in `d₂ − d₁` near `z = 0`.
#[inline]
pub fn sigma_omega(r: f64, z: f64, inv_kappa: f64) -> (f64, f64) {
    let (d1, d2) = dist_rz(r, z, inv_kappa);
    let sigma = 0.5 * (d1 + d2);
    let omega = if sigma > 0.0 { inv_kappa * z / sigma } else { 0.0 };
    (sigma, omega)
}

/// `μ·Λ(ξ)`. For `OmegaInc` pass `ε` as `kappa`.
pub fn lambda(xi: &Freq, kappa: f64, branch: Branch) -> Result<f64> {
    let mu = branch.mu();
    match branch.tag {
        BranchTag::Sigma => Ok(mu * sigma_omega(xi.r(), xi.z(), 1.0 / kappa).0),
        BranchTag::Omega => Ok(mu * sigma_omega(xi.r(), xi.z(), 1.0 / kappa).1),
        BranchTag::OmegaInc => {
            let a = xi.norm();
            if a == 0.0 {
                return invalid("incompressible relation is undefined at ξ = 0");
            }
            Ok(mu * xi.z() / (kappa * a))
        }
    }
}

fn guard(r: f64, z: f64, kappa: f64) -> Result<(f64, f64)> {
    let inv = 1.0 / kappa;
    let (d1, d2) = dist_rz(r, z, inv);
    let tol = 1e-8 * inv;
    if d1 < tol || d2 < tol || d1 == 0.0 || d2 == 0.0 {
        return Err(Error::Singular([r, 0.0, z]));
    }
    Ok((d1, d2))
}

fn sigma_or_omega(tag: BranchTag) -> Result<bool> {
    match tag {
        BranchTag::Sigma => Ok(true),
        BranchTag::Omega => Ok(false),
        BranchTag::OmegaInc => invalid("derivatives are provided for Sigma and Omega only"),
    }
}

/// `(∂_rΛ, ∂_zΛ)` for `Λ ∈ {Σ, Ω}` (the sign of `branch` is ignored).
pub fn grad_lambda(xi: &Freq, kappa: f64, tag: BranchTag) -> Result<(f64, f64)> {
    let is_sigma = sigma_or_omega(tag)?;
    let (r, z) = (xi.r(), xi.z());
    let (d1, d2) = guard(r, z, kappa)?;
    let inv = 1.0 / kappa;
    let (s, o) = sigma_omega(r, z, inv);
    let a = (z - inv) / d1;
    let b = (z + inv) / d2;
    Ok(if is_sigma {
        (r * s / (d1 * d2), 0.5 * (a + b))
    } else {
        (-r * o / (d1 * d2), 0.5 * (b - a))
    })
}

/// Hessian of `Λ` in the orthonormal frame `(e_r, e_θ, e_z)` at `ξ`.
///
/// Each distance satisfies `d ∇²d = I − ∇d⊗∇d`, which gives the entries below.
pub fn hessian_lambda(xi: &Freq, kappa: f64, tag: BranchTag) -> Result<[[f64; 3]; 3]> {
    let is_sigma = sigma_or_omega(tag)?;
    let (r, z) = (xi.r(), xi.z());
    if r == 0.0 {
        return invalid("the Hessian frame needs r > 0");
    }
    let (d1, d2) = guard(r, z, kappa)?;
    let inv = 1.0 / kappa;
    let (zm, zp) = (z - inv, z + inv);
    let (c1, c2) = (d1 * d1 * d1, d2 * d2 * d2);
    // Σ adds the two distance Hessians, Ω subtracts the first from the second
    let sg = if is_sigma { 1.0 } else { -1.0 };
    let rr = 0.5 * (zp * zp / c2 + sg * zm * zm / c1);
    let tt = 0.5 * (1.0 / d2 + sg / d1);
    let zz = 0.5 * r * r * (1.0 / c2 + sg / c1);
    let rz = -0.5 * r * (zp / c2 + sg * zm / c1);
    Ok([[rr, 0.0, rz], [0.0, tt, 0.0], [rz, 0.0, zz]])
}

/// `κ⁻²r²Λ/(d₁d₂)⁴`.
pub fn hessian_det_formula(xi: &Freq, kappa: f64, tag: BranchTag) -> Result<f64> {
    let is_sigma = sigma_or_omega(tag)?;
    let (r, z) = (xi.r(), xi.z());
    let inv = 1.0 / kappa;
    let (d1, d2) = dist_rz(r, z, inv);
    let (s, o) = sigma_omega(r, z, inv);
    let lam = if is_sigma { s } else { o };
    Ok(inv * inv * r * r * lam / (d1 * d2).powi(4))
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Rotate a cylindrical-frame matrix to Cartesian axes; `theta` is the azimuth
/// of `ξ_h`.
pub fn cylindrical_to_cartesian(h: &[[f64; 3]; 3], theta: f64) -> [[f64; 3]; 3] {
    let (s, c) = theta.sin_cos();
    // columns are e_r, e_θ, e_z
    let q = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    acc += q[i][a] * h[a][b] * q[j][b];
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Relative gaps `(|Σ/|ξ| − 1|, |cΩ_{cε}/ω_ε − 1|)` between the rotating
/// branches and their high-frequency limits.
pub fn asym_gap(xi: &Freq, c: f64, eps: f64) -> Result<(f64, f64)> {
    let kappa = c * eps;
    let a = xi.norm();
    if !(kappa * a >= 1.0) {
        return invalid(format!("asymptotic regime needs κ|ξ| >= 1, got {}", kappa * a));
    }
    if xi.z() == 0.0 {
        return invalid("the inertial gap needs ξ₃ ≠ 0");
    }
    let (s, o) = sigma_omega(xi.r(), xi.z(), 1.0 / kappa);
    let w = xi.z() / (eps * a);
    Ok(((s / a - 1.0).abs(), (c * o / w - 1.0).abs()))
}
