//! The diagonalizing change of unknowns `(ρ, u) ↔ (U_Ω, U_{−Ω}, U_Σ, U_{−Σ})`.
//!
//! At each `ξ ≠ 0` the state is first rotated into
//!
//! ```text
//! Y = (ρ̂, i e_h·û_h, i e_h^⊥·û_h, û₃),   e_h = ξ_h/|ξ_h|,  e_h^⊥ = (−e_h₂, e_h₁),
//! ```
//!
//! and `Y = 2√2 B (P, Q, R, I)` with `P, Q = (U_Ω ± U_{−Ω})/2`,
//! `R = (U_Σ + U_{−Σ})/2`, `I = (U_Σ − U_{−Σ})/(2i)`. `B` splits into a real
//! rotation by `θ₁` acting on `(P, R) → (Y₁, Y₃)` and a unitary block in `θ₂`
//! acting on `(Q, I) → (Y₂, Y₄)`, so inversion is a transpose.
//!
//! The amplitudes carry an extra `1/√2` compared to the synthesis written with
//! a factor 2 in front of `B`; with it `‖(ρ, u)‖_{L²} = 2‖U‖_{L²}` holds exactly.
//!
//! On the vertical axis `e_h` is taken as `sign(ξ₃)e₁`, the limit along the
//! `e₁` direction. The coefficients only depend on `(|ξ_h|, ξ₃)` and stay
//! continuous there. `ξ = 0` is not transformed; its coefficients are kept in
//! [`ModeSet::zero`].

use std::f64::consts::SQRT_2;

use rayon::prelude::*;

use crate::dispersion::{dist_rz, Branch, BranchTag, Freq};
use crate::error::{invalid, Error, Result};
use crate::grid::SpectralGrid;
use crate::par;
use crate::state::StateW;
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// The linear matrix: `∂_t Ŵ = c·M(ξ)Ŵ` for `Ŵ = (ρ̂, û)`.
pub fn matrix_m(xi: &Freq, kappa: f64) -> Result<[[C64; 4]; 4]> {
    if xi.norm() == 0.0 {
        return invalid("M(ξ) is only used for ξ ≠ 0");
    }
    let inv = 1.0 / kappa;
    let [a, b, c] = xi.xi.map(|x| C64::new(0.0, -x));
    let z = C64::new(0.0, 0.0);
    let k = C64::new(inv, 0.0);
    Ok([[z, a, b, c], [a, z, k, z], [b, -k, z, z], [c, z, z, z]])
}

/// Rotation data at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub cos1: f64,
    pub sin1: f64,
    pub cos2: f64,
    pub sin2: f64,
    pub eh: [f64; 2],
    pub sigma: f64,
    pub omega: f64,
}

impl Frame {
    /// `None` at `ξ = 0`.
    pub fn new(xi: [f64; 3], inv_kappa: f64) -> Option<Frame> {
        let r = xi[0].hypot(xi[1]);
        let z = xi[2];
        if r == 0.0 && z == 0.0 {
            return None;
        }
        let (d1, d2) = dist_rz(r, z, inv_kappa);
        let dd = d1 * d2;
        let ik2 = inv_kappa * inv_kappa;
        // f_Σ = Σ² − κ⁻², f_Ω = κ⁻² − Ω²; f_Σ + f_Ω = d₁d₂ and f_Σ f_Ω = κ⁻²r².
        // The larger one is a sum of nonnegative terms, the smaller comes from
        // the product.
        let t = r * r + z * z - ik2;
        let (fs, fo) = if t >= 0.0 {
            let fs = 0.5 * (dd + t);
            (fs, ik2 * r * r / fs)
        } else {
            let fo = 0.5 * (dd - t);
            (ik2 * r * r / fo, fo)
        };
        let d4 = dd.sqrt();
        let sigma = 0.5 * (d1 + d2);
        let omega = inv_kappa * z / sigma;
        let eh = if r > 0.0 { [xi[0] / r, xi[1] / r] } else { [z.signum(), 0.0] };
        Some(Frame {
            cos1: fo.sqrt() / d4,
            sin1: -fs.sqrt() / d4,
            cos2: (r * r + fo).sqrt() / d4,
            sin2: z * fs.sqrt() / (sigma * d4),
            eh,
            sigma,
            omega,
        })
    }

    /// `Ŵ → (U_Ω, U_{−Ω}, U_Σ, U_{−Σ})`.
    #[inline]
    pub fn analyze(&self, w: [C64; 4]) -> [C64; 4] {
        let [e1, e2] = self.eh;
        let y1 = w[0];
        let y2 = I * (e1 * w[1] + e2 * w[2]);
        let y3 = I * (e1 * w[2] - e2 * w[1]);
        let y4 = w[3];
        let k = 0.5 / SQRT_2;
        let (c1, s1, c2, s2) = (self.cos1, self.sin1, self.cos2, self.sin2);
        let p = k * (c1 * y1 + s1 * y3);
        let r = k * (c1 * y3 - s1 * y1);
        let q = k * (-I * s2 * y2 - c2 * y4);
        let im = k * (c2 * y2 + I * s2 * y4);
        [p + q, p - q, r + I * im, r - I * im]
    }

    /// `(U_Ω, U_{−Ω}, U_Σ, U_{−Σ}) → Ŵ`.
    #[inline]
    pub fn synthesize(&self, u: [C64; 4]) -> [C64; 4] {
        let p = 0.5 * (u[0] + u[1]);
        let q = 0.5 * (u[0] - u[1]);
        let r = 0.5 * (u[2] + u[3]);
        let im = -0.5 * I * (u[2] - u[3]);
        let k = 2.0 * SQRT_2;
        let (c1, s1, c2, s2) = (self.cos1, self.sin1, self.cos2, self.sin2);
        let y1 = k * (c1 * p - s1 * r);
        let y3 = k * (s1 * p + c1 * r);
        let y2 = k * (I * s2 * q + c2 * im);
        let y4 = k * (-c2 * q - I * s2 * im);
        let [e1, e2] = self.eh;
        // û_h = −i(Y₂ e_h + Y₃ e_h^⊥)
        [y1, -I * (e1 * y2 - e2 * y3), -I * (e2 * y2 + e1 * y3), y4]
    }

    /// Frequencies `(Ω, −Ω, Σ, −Σ)` in the order of the amplitudes.
    #[inline]
    pub fn taus(&self) -> [f64; 4] {
        [self.omega, -self.omega, self.sigma, -self.sigma]
    }
}

/// The eight multipliers of the synthesis `Y = 2B(P, Q, R, I)` and the two
/// rotation angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleCoeffs {
    pub b_rho1: f64,
    pub b_rho2: f64,
    pub b_beta1: f64,
    pub b_beta2: f64,
    pub b_alpha1: C64,
    pub b_alpha2: C64,
    pub b_gamma1: C64,
    pub b_gamma2: C64,
    pub theta1: f64,
    pub theta2: f64,
}

pub fn angle_coeffs(xi: &Freq, kappa: f64) -> Result<AngleCoeffs> {
    let inv = 1.0 / kappa;
    if xi.r() == 0.0 {
        return invalid("angle coefficients are defined off the vertical axis only");
    }
    let (d1, d2) = dist_rz(xi.r(), xi.z(), inv);
    if d1.min(d2) < 1e-8 * inv {
        return Err(Error::Singular(xi.xi));
    }
    let f = Frame::new(xi.xi, inv).expect("r > 0");
    Ok(AngleCoeffs {
        b_rho1: f.cos1,
        b_rho2: -f.sin1,
        b_beta1: f.sin1,
        b_beta2: f.cos1,
        b_alpha1: I * f.sin2,
        b_alpha2: C64::new(f.cos2, 0.0),
        b_gamma1: C64::new(-f.cos2, 0.0),
        b_gamma2: -I * f.sin2,
        theta1: f.sin1.atan2(f.cos1),
        theta2: f.sin2.atan2(f.cos2),
    })
}

/// Spectral coefficients of `V = (ρ, |∇|⁻¹div u, |∇|⁻¹e₃·curl u, u₃)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxV {
    pub rho: Vec<C64>,
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    pub gamma: Vec<C64>,
}

/// The Riesz-type symbols are zero at `ξ = 0`.
pub fn to_aux(grid: &SpectralGrid, w: &StateW) -> Result<AuxV> {
    grid.check(w.len())?;
    let v = w.map_freq(|idx, [rho, u1, u2, u3]| {
        let xi = grid.freq(idx);
        let a = Freq::from(xi).norm();
        if a == 0.0 {
            return [rho, C64::new(0.0, 0.0), C64::new(0.0, 0.0), u3];
        }
        let alpha = I * (xi[0] * u1 + xi[1] * u2 + xi[2] * u3) / a;
        let beta = I * (xi[0] * u2 - xi[1] * u1) / a;
        [rho, alpha, beta, u3]
    });
    let StateW { rho, u: [alpha, beta, gamma] } = v;
    Ok(AuxV { rho, alpha, beta, gamma })
}

/// Inverse of [`to_aux`] for states with `û(0) = 0` and `û_h = 0` on the
/// vertical axis; those coefficients come back as zero.
pub fn from_aux(grid: &SpectralGrid, v: &AuxV) -> Result<StateW> {
    grid.check(v.rho.len())?;
    let w = StateW { rho: v.rho.clone(), u: [v.alpha.clone(), v.beta.clone(), v.gamma.clone()] };
    Ok(w.map_freq(|idx, [rho, alpha, beta, gamma]| {
        let xi = grid.freq(idx);
        let r = xi[0].hypot(xi[1]);
        let a = r.hypot(xi[2]);
        let zero = C64::new(0.0, 0.0);
        if a == 0.0 {
            return [rho, zero, zero, zero];
        }
        if r == 0.0 {
            return [rho, zero, zero, gamma];
        }
        // ξ_h·û_h and ξ_h×û_h from the two Riesz components
        let dot = -I * a * alpha - xi[2] * gamma;
        let cross = -I * a * beta;
        let (e1, e2) = (xi[0] / r, xi[1] / r);
        [rho, (e1 * dot - e2 * cross) / r, (e2 * dot + e1 * cross) / r, gamma]
    }))
}

/// Amplitudes `(U_Ω, U_{−Ω}, U_Σ, U_{−Σ})` as spectral arrays. `zero` holds
/// `Ŵ(0)` when the grid contains `ξ = 0` (index 0); the amplitude arrays are
/// zero there.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub amp: [Vec<C64>; 4],
    pub zero: Option<[C64; 4]>,
}

impl ModeSet {
    pub fn zeros(len: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); len];
        ModeSet { amp: [z.clone(), z.clone(), z.clone(), z], zero: None }
    }

    /// Slot of a branch in [`ModeSet::amp`].
    pub fn slot(branch: Branch) -> Result<usize> {
        match (branch.tag, branch.sign) {
            (BranchTag::Omega, 1) => Ok(0),
            (BranchTag::Omega, _) => Ok(1),
            (BranchTag::Sigma, 1) => Ok(2),
            (BranchTag::Sigma, _) => Ok(3),
            (BranchTag::OmegaInc, _) => invalid("the incompressible branch has no amplitude"),
        }
    }

    /// `‖(U_Ω, U_{−Ω}, U_Σ, U_{−Σ})‖_{L²}`. The untransformed zero mode enters
    /// as `Ŵ(0)/2` so that `‖W‖ = 2‖U‖` holds for every state.
    pub fn l2_norm(&self, grid: &SpectralGrid) -> f64 {
        let len = self.amp[0].len();
        let mut s = par::sum(len, |i| self.amp.iter().map(|a| a[i].norm_sqr()).sum());
        if let Some(z) = self.zero {
            s += 0.25 * z.iter().map(|c| c.norm_sqr()).sum::<f64>();
        }
        let n = len as f64;
        (s * grid.box_len().powi(3) / (n * n)).sqrt()
    }
}

/// Frames for every grid frequency, computed once and shared.
#[derive(Debug, Clone)]
pub struct Frames {
    frames: Vec<Option<Frame>>,
}

impl Frames {
    pub fn new(grid: &SpectralGrid, kappa: f64) -> Result<Self> {
        let inv = 1.0 / kappa;
        if grid.is_shifted() || inv == 0.0 {
            // shifted grids never hold (0, 0, ±κ⁻¹)
        } else {
            let dk = 2.0 * std::f64::consts::PI / grid.box_len();
            let m = (inv / dk).round();
            if (m * dk - inv).abs() <= 1e-6 * dk && m < (grid.n() / 2) as f64 {
                return Err(Error::Singular([0.0, 0.0, inv]));
            }
        }
        Ok(Frames { frames: grid.map_freq(|_, xi| Frame::new(xi, inv)) })
    }

    #[inline]
    pub fn get(&self, idx: usize) -> Option<&Frame> {
        self.frames[idx].as_ref()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

pub fn to_modes(grid: &SpectralGrid, w: &StateW, kappa: f64) -> Result<ModeSet> {
    grid.check(w.len())?;
    to_modes_with(&Frames::new(grid, kappa)?, w)
}

pub fn from_modes(grid: &SpectralGrid, m: &ModeSet, kappa: f64) -> Result<StateW> {
    grid.check(m.amp[0].len())?;
    from_modes_with(&Frames::new(grid, kappa)?, m)
}

pub fn to_modes_with(frames: &Frames, w: &StateW) -> Result<ModeSet> {
    if frames.len() != w.len() {
        return Err(Error::Shape { expected: frames.len(), got: w.len() });
    }
    let out: Vec<[C64; 4]> = (0..w.len())
        .into_par_iter()
        .map(|i| match frames.get(i) {
            Some(f) => f.analyze(w.at(i)),
            None => [C64::new(0.0, 0.0); 4],
        })
        .collect();
    let mut m = ModeSet::zeros(w.len());
    for (i, v) in out.into_iter().enumerate() {
        for (a, x) in m.amp.iter_mut().zip(v) {
            a[i] = x;
        }
    }
    m.zero = (0..w.len()).find(|&i| frames.get(i).is_none()).map(|i| w.at(i));
    Ok(m)
}

pub fn from_modes_with(frames: &Frames, m: &ModeSet) -> Result<StateW> {
    let len = m.amp[0].len();
    if frames.len() != len || m.amp.iter().any(|a| a.len() != len) {
        return Err(Error::Shape { expected: frames.len(), got: len });
    }
    let w = StateW::zeros(len);
    Ok(w.map_freq(|i, _| match frames.get(i) {
        Some(f) => f.synthesize([m.amp[0][i], m.amp[1][i], m.amp[2][i], m.amp[3][i]]),
        None => m.zero.unwrap_or([C64::new(0.0, 0.0); 4]),
    }))
}

/// `𝕡_{μΛ}W`: synthesis from one amplitude, the others and the zero mode
/// dropped.
pub fn project_mode(grid: &SpectralGrid, w: &StateW, kappa: f64, branch: Branch) -> Result<StateW> {
    let slot = ModeSet::slot(branch)?;
    let frames = Frames::new(grid, kappa)?;
    let mut m = to_modes_with(&frames, w)?;
    for (k, a) in m.amp.iter_mut().enumerate() {
        if k != slot {
            a.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        }
    }
    m.zero = None;
    from_modes_with(&frames, &m)
}
