use std::f64::consts::PI;

use rand::Rng;

use super::*;
use crate::grid::build_grid;
use crate::propagator::evolve_linear;
use crate::random;

fn params(eps: f64) -> PhysParams {
    PhysParams::new(1.0, eps, 1.0 / 3.0).unwrap()
}

fn grid(n: usize) -> SpectralGrid {
    build_grid(n, 2.0 * PI * 1.05, 1.0).unwrap()
}

/// A few real Fourier modes with their exact gradients.
struct TrigField {
    modes: Vec<([f64; 3], f64, f64)>,
}

impl TrigField {
    fn random(r: &mut impl Rng, g: &SpectralGrid, mmax: i64, amp: f64) -> Self {
        let dk = 2.0 * PI / g.box_len();
        let modes = (0..6)
            .map(|_| {
                let k = [0, 1, 2].map(|_| dk * r.random_range(-mmax..=mmax) as f64);
                (k, amp * r.random_range(-1.0..1.0), amp * r.random_range(-1.0..1.0))
            })
            .collect();
        TrigField { modes }
    }

    fn eval(&self, x: [f64; 3]) -> (f64, [f64; 3]) {
        let mut v = 0.0;
        let mut d = [0.0; 3];
        for (k, a, b) in &self.modes {
            let ph = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            let (s, c) = ph.sin_cos();
            v += a * c + b * s;
            for j in 0..3 {
                d[j] += k[j] * (b * c - a * s);
            }
        }
        (v, d)
    }

    fn sample(&self, g: &SpectralGrid) -> Vec<f64> {
        (0..g.len()).map(|i| self.eval(g.point(i)).0).collect()
    }
}

fn trig_state(g: &SpectralGrid, seed: u64, mmax: i64, amp: f64) -> (StateW, [TrigField; 4]) {
    let mut r = random::rng(seed);
    let f: [TrigField; 4] = std::array::from_fn(|_| TrigField::random(&mut r, g, mmax, amp));
    let v: Vec<Vec<f64>> = f.iter().map(|t| t.sample(g)).collect();
    (StateW::from_physical(g, &v[0], [&v[1], &v[2], &v[3]]).unwrap(), f)
}

fn rel(a: &StateW, b: &StateW) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.components().into_iter().zip(b.components()) {
        for (p, q) in x.iter().zip(y) {
            num += (p - q).norm_sqr();
            den += q.norm_sqr();
        }
    }
    (num / den).sqrt()
}

#[test]
fn zero_state_is_an_equilibrium() {
    let g = grid(16);
    let t = rhs(&g, &StateW::zeros(g.len()), &params(0.5)).unwrap();
    assert!(t.components().iter().all(|c| c.iter().all(|z| z.norm() == 0.0)));
}

#[test]
fn constant_velocity_rotates() {
    let g = grid(16);
    let mut w = StateW::zeros(g.len());
    let u = [0.3, -0.7, 0.2];
    let n3 = g.len() as f64;
    for a in 0..3 {
        w.u[a][0] = C64::new(u[a] * n3, 0.0);
    }
    let t = rhs(&g, &w, &params(0.5)).unwrap();
    let want = [2.0 * u[1], -2.0 * u[0], 0.0];
    for a in 0..3 {
        assert!((t.u[a][0] / n3 - want[a]).norm() < 1e-14);
        assert!(t.u[a][1..].iter().all(|z| z.norm() < 1e-12));
    }
    assert!(t.rho.iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn rhs_matches_pointwise_formula() {
    // modes up to n/6 keep every product below the 2/3 cutoff
    let g = grid(24usize.next_power_of_two());
    let p = PhysParams::new(1.4, 0.7, 0.25).unwrap();
    let (w, f) = trig_state(&g, 11, 5, 0.3);
    let t = rhs(&g, &w, &p).unwrap();
    let got = t.to_physical(&g).unwrap();
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for i in 0..g.len() {
        let x = g.point(i);
        let (rho, dr) = f[0].eval(x);
        let e: [(f64, [f64; 3]); 3] = std::array::from_fn(|a| f[a + 1].eval(x));
        let u = [e[0].0, e[1].0, e[2].0];
        let div = e[0].1[0] + e[1].1[1] + e[2].1[2];
        let s = p.c + p.alpha * rho;
        let want = [
            -(u[0] * dr[0] + u[1] * dr[1] + u[2] * dr[2]) - s * div,
            -(u[0] * e[0].1[0] + u[1] * e[0].1[1] + u[2] * e[0].1[2]) + u[1] / p.eps - s * dr[0],
            -(u[0] * e[1].1[0] + u[1] * e[1].1[1] + u[2] * e[1].1[2]) - u[0] / p.eps - s * dr[1],
            -(u[0] * e[2].1[0] + u[1] * e[2].1[1] + u[2] * e[2].1[2]) - s * dr[2],
        ];
        for c in 0..4 {
            err = err.max((got[c][i] - want[c]).abs());
            scale = scale.max(want[c].abs());
        }
    }
    assert!(err < 1e-12 * scale, "{err} vs {scale}");
}

#[test]
fn linear_only_step_is_the_exact_flow() {
    let g = grid(16);
    let p = params(0.5);
    let mut cfg = SolverConfig::new(p, g.clone(), 1.0);
    cfg.nonlinear = false;
    let s = Solver::new(cfg.clone()).unwrap();
    let (mut w, _) = trig_state(&g, 3, 4, 1.0);
    s.dealias(&mut w);
    let a = s.step(&w, cfg.dt).unwrap();
    let b = evolve_linear(&g, &w, &p, cfg.dt).unwrap();
    assert!(rel(&a, &b) < 1e-14, "{}", rel(&a, &b));
}

#[test]
fn small_data_deviate_linearly_in_amplitude() {
    let g = grid(16);
    let p = params(0.5);
    let cfg = SolverConfig::new(p, g.clone(), 1.0);
    let s = Solver::new(cfg.clone()).unwrap();
    let dev = |amp: f64| {
        let (mut w, _) = trig_state(&g, 4, 4, amp);
        s.dealias(&mut w);
        rel(&s.step(&w, cfg.dt).unwrap(), &evolve_linear(&g, &w, &p, cfg.dt).unwrap())
    };
    let (d1, d2) = (dev(1e-8), dev(1e-6));
    assert!(d1 < 1e-8, "{d1}");
    assert!((d2 / d1 / 100.0 - 1.0).abs() < 0.01, "{d1} {d2}");
}

#[test]
fn fourth_order_in_time() {
    let g = grid(16);
    let p = params(0.5);
    let (w, _) = trig_state(&g, 5, 2, 0.15);
    let run = |dt: f64| {
        let mut cfg = SolverConfig::new(p, g.clone(), 0.4);
        cfg.dt = dt;
        cfg.blowup_threshold = Threshold::Relative(1e6);
        let tr = simulate(&w, &cfg).unwrap();
        assert_eq!(tr.termination, Termination::Completed);
        tr.state
    };
    let h = SolverConfig::new(p, g.clone(), 0.4).max_dt();
    let (a, b, c) = (run(h), run(h / 2.0), run(h / 4.0));
    let ratio = rel(&a, &b) / rel(&b, &c);
    assert!((12.0..=20.0).contains(&ratio), "{ratio}");
}

#[test]
fn energy_is_nearly_conserved_and_fields_stay_real() {
    // at n = 16 the truncation error alone is ~3e-6
    let g = grid(32);
    let p = params(0.5);
    let (w, _) = trig_state(&g, 6, 2, 0.05);
    let cfg = SolverConfig::new(p, g.clone(), 1.0);
    let tr = simulate(&w, &cfg).unwrap();
    assert_eq!(tr.termination, Termination::Completed);
    let e0 = tr.samples[0].energy;
    let drift = tr.samples.iter().map(|s| (s.energy / e0 - 1.0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-6, "{drift}");
    let e_end = energy_physical(&g, &tr.state, &p).unwrap();
    assert!((e_end - tr.samples.last().unwrap().energy).abs() < 1e-12 * e0);
    let im = tr.state.components().iter().map(|c| g.to_physical(c).unwrap().iter().fold(0.0f64, |m, z| m.max(z.im.abs()))).fold(0.0, f64::max);
    assert!(im < 1e-10);
}

#[test]
fn l2_drift_per_step_for_small_data() {
    let g = grid(16);
    let p = params(0.5);
    let cfg = SolverConfig::new(p, g.clone(), 1.0);
    let s = Solver::new(cfg.clone()).unwrap();
    let (mut w, _) = trig_state(&g, 7, 3, 1e-9);
    s.dealias(&mut w);
    let n0 = crate::norms::state(&g, &w, 0.0).unwrap();
    let n1 = crate::norms::state(&g, &s.step(&w, cfg.dt).unwrap(), 0.0).unwrap();
    assert!((n1 / n0 - 1.0).abs() < 1e-10);
}

#[test]
fn energy_quadratic_limit() {
    // E = ½c^{1/α}(‖u‖² + ‖ρ‖²)(1 + O(a)): the relative defect halves with a
    let g = grid(16);
    let p = PhysParams::new(1.5, 1.0, 1.0 / 3.0).unwrap();
    let defect = |a: f64| {
        let (w, _) = trig_state(&g, 8, 3, a);
        let quad = 0.5 * p.c.powf(1.0 / p.alpha) * crate::norms::state(&g, &w, 0.0).unwrap().powi(2);
        energy_physical(&g, &w, &p).unwrap() / quad - 1.0
    };
    let (d1, d2) = (defect(1e-3), defect(5e-4));
    assert!(d1.abs() < 0.1);
    assert!((d1 / d2 - 2.0).abs() < 0.05, "{d1} {d2}");
    assert_eq!(energy_physical(&g, &StateW::zeros(g.len()), &p).unwrap(), 0.0);
}

#[test]
fn zero_data_run() {
    let g = grid(8);
    let cfg = SolverConfig::new(params(1.0), g.clone(), 0.5);
    let tr = simulate(&StateW::zeros(g.len()), &cfg).unwrap();
    assert_eq!(tr.termination, Termination::Completed);
    assert!((tr.t_final() - 0.5).abs() < 1e-15);
    assert!(tr.samples.iter().all(|s| s.hs_norm == 0.0 && s.b == 0.0 && s.energy == 0.0));
    assert!(tr.samples.windows(2).all(|p| p[1].t > p[0].t));
    let fit = gronwall_check(&tr).unwrap();
    assert!(fit.holds && fit.k == 0.0);
}

#[test]
fn gronwall_fit_is_tight() {
    let g = grid(16);
    let (w, _) = trig_state(&g, 9, 2, 0.1);
    let mut cfg = SolverConfig::new(params(0.5), g.clone(), 1.0);
    cfg.dt /= 2.0;
    let tr = simulate(&w, &cfg).unwrap();
    let fit = gronwall_check(&tr).unwrap();
    assert!(fit.holds && fit.k >= 0.0 && fit.k < 20.0);
    let n0 = tr.samples[0].hs_norm;
    for s in &tr.samples {
        assert!(s.hs_norm <= n0 * (fit.k * s.b).exp() * (1.0 + 1e-12));
        assert!(s.b >= 0.0);
    }
    assert!(tr.samples.windows(2).all(|p| p[1].b >= p[0].b));
    // linear flow: the Sobolev norm is constant, so K ≈ 0
    let mut lin = cfg.clone();
    lin.nonlinear = false;
    let k = gronwall_check(&simulate(&w, &lin).unwrap()).unwrap().k;
    assert!(k < 1e-10, "{k}");
}

#[test]
fn coarse_sampling_is_rejected() {
    let g = grid(16);
    let (w, _) = trig_state(&g, 10, 2, 30.0);
    let mut cfg = SolverConfig::new(params(0.5), g.clone(), 0.1);
    cfg.nonlinear = false;
    let tr = simulate(&w, &cfg).unwrap();
    assert!(gronwall_check(&tr).is_err());
}

#[test]
fn shifted_grid_is_rejected() {
    let g = build_grid(16, 2.0 * PI, 1.0).unwrap();
    assert!(g.is_shifted());
    let cfg = SolverConfig::new(params(1.0), g, 1.0);
    assert!(cfg.validate().is_err());
    assert!(Solver::new(cfg).is_err());
}

#[test]
fn config_validation() {
    let g = grid(16);
    let mut cfg = SolverConfig::new(params(0.5), g.clone(), 1.0);
    assert!(cfg.validate().is_ok());
    let kmax = cfg.k_max();
    assert!((kmax - 3f64.sqrt() * 5.0 / 1.05).abs() < 1e-12, "{kmax}");
    cfg.dt *= 1.01;
    assert!(cfg.validate().is_err());
    assert!(step(&StateW::zeros(g.len()), &cfg).is_err());
    let mut bad = SolverConfig::new(params(0.5), g, 1.0);
    bad.blowup_threshold = Threshold::Relative(0.0);
    assert!(bad.validate().is_err());
}

#[test]
fn sweep_input_checks() {
    let g = grid(8);
    let cfg = SolverConfig::new(params(1.0), g.clone(), 0.1);
    let w = StateW::zeros(g.len());
    assert!(lifespan_sweep(&w, &cfg, &[0.5, 1.0], 3.0).is_err());
    assert!(lifespan_sweep(&w, &cfg, &[], 3.0).is_err());
    assert!(lifespan_sweep(&w, &cfg, &[1.0], 2.0).is_err());
    let rows = lifespan_sweep(&w, &cfg, &[f64::INFINITY, 1.0], 3.0).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].predicted, 0.0);
    assert!((rows[1].predicted - 1.0).abs() < 1e-15);
    assert!(rows.iter().all(|r| r.lower_bound_only && r.termination == Termination::Completed));
}

#[test]
fn sideris_profile() {
    let g = grid(32);
    let d = SiderisData { direction: -1.0, ..SiderisData::new(0.5, g.box_len()) };
    let w = d.state(&g).unwrap();
    let [rho, u1, _, _] = w.to_physical(&g).unwrap();
    let peak = rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(peak > 0.4 && peak <= 0.5);
    // inward: u·(x − x_c) ≤ 0 wherever ρ > 0
    for i in 0..g.len() {
        let x = g.point(i)[0] - 0.5 * g.box_len();
        assert!(u1[i] * x <= 1e-12);
    }
}

