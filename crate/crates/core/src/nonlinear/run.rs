use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::grid::SpectralGrid;
use crate::norms;
use crate::state::StateW;

use super::{Solver, SolverConfig, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    BlowUp,
    ResolutionLoss,
    NonFinite,
    Vacuum,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::BlowUp => "blowup",
            Termination::ResolutionLoss => "resolution_loss",
            Termination::NonFinite => "non_finite",
            Termination::Vacuum => "vacuum",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub t: f64,
    /// `‖W‖_{H^s}` with `s = s_monitor`.
    pub hs_norm: f64,
    /// `‖(∇ρ, ∇u)‖_{L∞}`
    pub grad_sup: f64,
    /// `∫₀ᵗ ‖(∇ρ, ∇u)‖_{L∞}`, trapezoid rule over the samples.
    pub b: f64,
    /// NaN once `c + αρ` reaches zero.
    pub energy: f64,
    pub tail: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub s_monitor: f64,
    pub dt: f64,
    /// Last state reached.
    pub state: StateW,
}

impl Trajectory {
    pub fn t_final(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

/// Integrate until `t_end` or until a stopping criterion fires. Numerical
/// trouble ends the run and is recorded, it is not an error.
pub fn simulate(w0: &StateW, config: &SolverConfig) -> Result<Trajectory> {
    let solver = Solver::new(config.clone())?;
    config.grid.check(w0.len())?;
    let mut w = w0.clone();
    solver.dealias(&mut w);
    let dt = config.dt;
    let steps = if config.t_end == 0.0 { 0 } else { (config.t_end / dt * (1.0 - 1e-12)).ceil() as usize };
    let h = if steps == 0 { dt } else { config.t_end / steps as f64 };

    let mut samples: Vec<Sample> = Vec::with_capacity(steps + 1);
    let mut limit = f64::INFINITY;
    let mut termination = Termination::Completed;
    for n in 0..=steps {
        let t = n as f64 * h;
        let (k1, diag) = match solver.nonlinear_term(&w) {
            Ok(v) => v,
            Err(_) => {
                termination = Termination::NonFinite;
                break;
            }
        };
        let hs = norms::state(&config.grid, &w, config.s_monitor).unwrap_or(f64::NAN);
        let b = match samples.last() {
            Some(p) => p.b + 0.5 * (t - p.t) * (p.grad_sup + diag.grad_sup),
            None => {
                limit = match config.blowup_threshold {
                    Threshold::Absolute(v) => v,
                    Threshold::Relative(f) => f * diag.grad_sup,
                };
                0.0
            }
        };
        let tail = solver.tail_fraction(&w);
        samples.push(Sample { t, hs_norm: hs, grad_sup: diag.grad_sup, b, energy: diag.energy.unwrap_or(f64::NAN), tail });
        if !hs.is_finite() {
            termination = Termination::NonFinite;
            break;
        }
        if diag.energy.is_none() {
            termination = Termination::Vacuum;
            break;
        }
        if n > 0 && diag.grad_sup > limit {
            termination = Termination::BlowUp;
            break;
        }
        if tail > config.tail_limit {
            termination = Termination::ResolutionLoss;
            break;
        }
        if n == steps {
            break;
        }
        match solver.step_from(&w, &k1, h) {
            Ok(next) => w = next,
            Err(_) => {
                termination = Termination::NonFinite;
                break;
            }
        }
    }
    Ok(Trajectory { samples, termination, s_monitor: config.s_monitor, dt: h, state: w })
}

/// Smallest `K ≥ 0` with `‖W(t)‖_{H^s} ≤ ‖W(0)‖_{H^s}·e^{K·B(t)}` along the run.
#[derive(Debug, Clone, Copy)]
pub struct GronwallFit {
    pub holds: bool,
    pub k: f64,
    /// Largest increment of `B` between consecutive samples.
    pub max_db: f64,
}

pub fn gronwall_check(traj: &Trajectory) -> Result<GronwallFit> {
    let s = &traj.samples;
    if s.len() < 2 {
        return invalid("trajectory needs at least two samples");
    }
    let max_db = s.windows(2).map(|p| p[1].b - p[0].b).fold(0.0, f64::max);
    if max_db > 0.1 {
        return invalid(format!("trajectory too coarse: B grows by {max_db:.3} between samples, need ≤ 0.1"));
    }
    let n0 = s[0].hs_norm;
    let mut k: f64 = 0.0;
    if n0 > 0.0 {
        for p in &s[1..] {
            if p.b > 0.0 {
                k = k.max((p.hs_norm / n0).ln() / p.b);
            }
        }
    }
    Ok(GronwallFit { holds: k.is_finite(), k, max_db })
}

/// Radial compression pulse centred in the box: `ρ = a·exp(−((r − R)/w)²)` and
/// the matching radial velocity `u = d·ρ·(x − x_c)/R`, outgoing for `d = 1`.
#[derive(Debug, Clone, Copy)]
pub struct SiderisData {
    pub amplitude: f64,
    pub radius: f64,
    pub width: f64,
    pub direction: f64,
}

impl SiderisData {
    /// Outgoing, `R = L/6`, `w = L/19`.
    pub fn new(amplitude: f64, box_len: f64) -> Self {
        SiderisData { amplitude, radius: box_len / 6.0, width: box_len / 19.0, direction: 1.0 }
    }

    pub fn state(&self, grid: &SpectralGrid) -> Result<StateW> {
        if !(self.radius > 0.0 && self.width > 0.0 && self.amplitude.is_finite()) {
            return invalid("pulse radius and width must be positive");
        }
        let half = 0.5 * grid.box_len();
        let len = grid.len();
        let pts: Vec<([f64; 3], f64)> = (0..len)
            .into_par_iter()
            .map(|i| {
                let x = grid.point(i).map(|v| v - half);
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                (x, self.amplitude * (-((r - self.radius) / self.width).powi(2)).exp())
            })
            .collect();
        let rho: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let u: [Vec<f64>; 3] = std::array::from_fn(|a| pts.iter().map(|(x, r)| self.direction * r * x[a] / self.radius).collect());
        StateW::from_physical(grid, &rho, [&u[0], &u[1], &u[2]])
    }
}

#[derive(Debug, Clone)]
pub struct LifespanRow {
    pub eps: f64,
    /// Time the run ended.
    pub t_star: f64,
    pub termination: Termination,
    /// Set unless the run ended by crossing the blow-up threshold.
    pub lower_bound_only: bool,
    /// `ε^{−1/(q−1)}·min{1, (cε)^{3/(q−1)}}`
    pub predicted: f64,
    pub dt: f64,
}

/// Run the same data for each `ε` (decreasing, `+∞` allowed) with a common
/// absolute threshold fixed from `w0`.
pub fn lifespan_sweep(w0: &StateW, config: &SolverConfig, eps_list: &[f64], q: f64) -> Result<Vec<LifespanRow>> {
    if eps_list.is_empty() {
        return invalid("empty eps list");
    }
    if eps_list.windows(2).any(|p| !(p[1] < p[0])) {
        return invalid("eps list must be strictly decreasing");
    }
    if !(q > 2.0) {
        return invalid(format!("q must exceed 2, got {q}"));
    }
    let threshold = match config.blowup_threshold {
        Threshold::Absolute(v) => v,
        Threshold::Relative(f) => {
            let s = Solver::new(config.clone())?;
            let mut w = w0.clone();
            s.dealias(&mut w);
            let g0 = s.nonlinear_term(&w)?.1.grad_sup;
            if g0 > 0.0 {
                f * g0
            } else {
                f64::INFINITY
            }
        }
    };
    let cfgs: Vec<SolverConfig> = eps_list
        .iter()
        .map(|&eps| {
            let mut cfg = config.clone();
            cfg.params = config.params.with_eps(eps)?;
            cfg.blowup_threshold = Threshold::Absolute(threshold);
            cfg.dt = config.dt.min(cfg.max_dt());
            Ok(cfg)
        })
        .collect::<Result<_>>()?;
    cfgs.par_iter()
        .map(|cfg| {
            let traj = simulate(w0, cfg)?;
            let eps = cfg.params.eps;
            let c = cfg.params.c;
            let predicted = eps.powf(-1.0 / (q - 1.0)) * (c * eps).powf(3.0 / (q - 1.0)).min(1.0);
            Ok(LifespanRow {
                eps,
                t_star: traj.t_final(),
                termination: traj.termination,
                lower_bound_only: traj.termination != Termination::BlowUp,
                predicted,
                dt: traj.dt,
            })
        })
        .collect()
}
