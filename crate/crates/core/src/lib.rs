//! Spectral toolkit for the three-dimensional compressible Euler equations with
//! Coriolis forcing, written in sound-speed variables
//!
//! ```text
//! ρ_t + u·∇ρ + (c + αρ) div u = 0
//! u_t + u·∇u + ε⁻¹ e₃×u + (c + αρ) ∇ρ = 0
//! ```
//!
//! on a periodic box. The linear part disperses along two branches, the
//! acoustic `Σ` and the inertial `Ω`; [`modes`] diagonalizes it, [`propagator`]
//! evolves it exactly and measures decay and Strichartz norms, and
//! [`nonlinear`] integrates the full system with an integrating-factor RK4.

pub mod dispersion;
pub mod error;
pub mod grid;
pub mod localization;
pub mod modes;
pub mod nonlinear;
pub mod norms;
pub mod params;
pub mod propagator;
pub mod quadrature;
pub mod random;
pub mod state;

mod fft;
mod par;

pub use dispersion::{Branch, BranchTag, Freq};
pub use error::{Error, Result};
pub use grid::{build_grid, SpectralGrid};
pub use localization::{AxisLoc, LocSpec};
pub use modes::{AngleCoeffs, ModeSet};
pub use params::PhysParams;
pub use state::StateW;

pub use num_complex::Complex64 as C64;
