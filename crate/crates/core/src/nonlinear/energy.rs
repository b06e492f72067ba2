use crate::error::{Error, Result};
use crate::grid::SpectralGrid;
use crate::params::PhysParams;
use crate::par;
use crate::state::StateW;

/// `½n|u|² + 𝔢(n)` with `n = (c + αρ)^{1/α}`, `n₀ = c^{1/α}` and
/// `𝔢(n) = [n^{2α+1} − n₀^{2α+1} − (2α+1)n₀^{2α}(n − n₀)] / (2α(2α+1))`.
/// NaN in vacuum.
pub(crate) fn density(rho: f64, u: [f64; 3], p: &PhysParams) -> f64 {
    let (c, al) = (p.c, p.alpha);
    let x = al * rho / c;
    if !(x > -1.0) {
        return f64::NAN;
    }
    let y = x.ln_1p();
    let n0 = c.powf(1.0 / al);
    let b = 1.0 / al;
    let a = 2.0 + b;
    let m = 2.0 * al + 1.0;
    // (1+x)^a − 1 − m((1+x)^b − 1), whose linear term cancels
    let bracket = if y.abs() < 1e-3 {
        let (mut term, mut pa, mut pb, mut s) = (y, a, b, 0.0);
        for j in 2..10 {
            term *= y / j as f64;
            pa *= a;
            pb *= b;
            s += term * (pa - m * pb);
        }
        s
    } else {
        (a * y).exp_m1() - m * (b * y).exp_m1()
    };
    let n = n0 * (b * y).exp();
    0.5 * n * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]) + n0 * c * c * bracket / (2.0 * al * m)
}

/// `E = ∫ ½n|u|² + 𝔢(n) dx`, the formally conserved energy.
pub fn energy_physical(grid: &SpectralGrid, w: &StateW, params: &PhysParams) -> Result<f64> {
    let [rho, u1, u2, u3] = w.to_physical(grid)?;
    let min = rho.iter().fold(f64::INFINITY, |m, r| m.min(params.c + params.alpha * r));
    if !(min > 0.0) {
        return Err(Error::Numerical(format!("vacuum: c + αρ reaches {min:.3e}")));
    }
    Ok(par::sum(rho.len(), |i| density(rho[i], [u1[i], u2[i], u3[i]], params)) * grid.cell_volume())
}
