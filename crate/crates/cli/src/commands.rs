use std::f64::consts::PI;

use rayon::prelude::*;

use rotating_euler::dispersion::{hessian_det_formula, sigma_omega};
use rotating_euler::localization::psi;
use rotating_euler::modes::{from_modes_with, matrix_m, to_modes_with, Frame, Frames};
use rotating_euler::nonlinear::{
    gronwall_check, lifespan_sweep, simulate, SiderisData, Solver, SolverConfig, Termination,
};
use rotating_euler::norms::{self, NormKind};
use rotating_euler::propagator::{
    evolve_linear, kernel_quadrature, measure_decay, optimal_decay, optimal_decay_direct, strichartz_norm,
};
use rotating_euler::{build_grid, random, BranchTag, Error, Freq, PhysParams, SpectralGrid, StateW, C64};

use crate::config::*;
use crate::report::{num, Report};

#[derive(Debug)]
pub enum CliError {
    /// Bad config or arguments; exit code 2.
    Validation(String),
    /// The computation itself failed; exit code 3.
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A report plus whether its pass/fail gate (if any) held.
pub struct Outcome {
    pub report: Report,
    pub gate: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, gate: true }
    }
}

fn params(c: f64, eps: f64, alpha: f64) -> CliResult<PhysParams> {
    Ok(PhysParams::new(c, eps, alpha)?)
}

fn state_l2(g: &SpectralGrid, w: &StateW) -> CliResult<f64> {
    let mut s = 0.0;
    for c in w.components() {
        s += norms::spectral(g, c, NormKind::L2)?.powi(2);
    }
    Ok(s.sqrt())
}

pub fn dispersion_table(cfg: &DispersionTable) -> CliResult<Outcome> {
    if !(cfg.kappa > 0.0) {
        return Err(CliError::Validation(format!("kappa must be positive, got {}", cfg.kappa)));
    }
    let mut rep = Report::new(
        "dispersion-table",
        cfg,
        &["xi1", "xi2", "xi3", "sigma", "omega", "det_hess_sigma", "det_hess_omega"],
    );
    rep.note("units: xi and the dispersion relations in the rescaled variables (c = 1); nan at the singular points");
    let inv = 1.0 / cfg.kappa;
    for xi in cfg.lattice.points() {
        let f = Freq::from(xi);
        let (s, o) = sigma_omega(f.r(), f.z(), inv);
        let singular = f.r() == 0.0 && (f.z().abs() - inv).abs() == 0.0;
        let det = |tag| if singular { f64::NAN } else { hessian_det_formula(&f, cfg.kappa, tag).unwrap_or(f64::NAN) };
        rep.row(vec![
            num(xi[0]),
            num(xi[1]),
            num(xi[2]),
            num(s),
            num(o),
            num(det(BranchTag::Sigma)),
            num(det(BranchTag::Omega)),
        ]);
    }
    Ok(rep.into())
}

pub fn transform_check(cfg: &TransformCheck) -> CliResult<Outcome> {
    let g = build_grid(cfg.n, cfg.box_len, cfg.kappa)?;
    let frames = Frames::new(&g, cfg.kappa)?;
    let mut rep = Report::new("transform-check", cfg, &["field", "norm_w", "two_norm_u", "isometry_rel_err", "round_trip_rel_err"]);
    rep.note(format!("grid shifted: {}", g.is_shifted()));
    for j in 0..cfg.fields {
        let w = random::state(&g, cfg.seed.wrapping_add(j as u64))?;
        let m = to_modes_with(&frames, &w)?;
        let (a, b) = (state_l2(&g, &w)?, 2.0 * m.l2_norm(&g));
        let back = from_modes_with(&frames, &m)?;
        rep.row(vec![j.to_string(), num(a), num(b), num((a - b).abs() / a), num(back.max_rel_diff(&w))]);
    }
    Ok(rep.into())
}

pub fn decay(cfg: &Decay) -> CliResult<Outcome> {
    if cfg.samples < 2 || !(cfg.t_min > 0.0 && cfg.t_max > cfg.t_min) {
        return Err(CliError::Validation("need samples >= 2 and 0 < t_min < t_max".into()));
    }
    let times: Vec<f64> = (0..cfg.samples)
        .map(|i| cfg.t_min * (cfg.t_max / cfg.t_min).powf(i as f64 / (cfg.samples - 1) as f64))
        .collect();
    let window = cfg.window.map_or((cfg.t_min, cfg.t_max), |w| (w[0], w[1]));
    let mut rep = Report::new(
        "decay",
        cfg,
        &["branch", "loc", "kappa", "fitted_exponent", "fitted_coeff", "window_t0", "window_t1", "max_group_speed", "sup_norms"],
    );
    rep.note("sup_norms: ‖e^{itΛ}P f‖_{L∞} at each sample time, separated by ';'");
    for &kappa in &cfg.kappas {
        let p = params(cfg.c, kappa / cfg.c, 1.0)?;
        let g = build_grid(cfg.n, cfg.box_len, kappa)?;
        for case in &cfg.cases {
            let fh: Vec<C64> = match case.data {
                DataShape::Ones => vec![C64::new(1.0, 0.0); g.len()],
                DataShape::Psi => g.map_freq(|_, xi| C64::new(psi(Freq::from(xi).norm()), 0.0)),
            };
            let loc = case.loc.spec();
            let d = measure_decay(&g, &fh, &loc, case.branch.branch(), &p, &times, window)?;
            let sups: Vec<String> = d.sup_norms.iter().map(|s| num(*s)).collect();
            rep.row(vec![
                d.branch.name().into(),
                loc.label(),
                num(kappa),
                num(d.fitted_exponent),
                num(d.fitted_coeff),
                num(d.window.0),
                num(d.window.1),
                num(d.max_speed),
                sups.join(";"),
            ]);
        }
    }
    Ok(rep.into())
}

pub fn strichartz(cfg: &Strichartz) -> CliResult<Outcome> {
    let mut rep = Report::new("strichartz", cfg, &["k", "kappa", "box_len", "t_final", "nodes", "norm", "bound", "ratio", "l2"]);
    rep.note("data: f̂ = 1 localized to the shell P_k; ratio = norm / bound");
    let branch = cfg.branch.branch();
    for &k in &cfg.ks {
        for &kappa in &cfg.kappas {
            let p = params(cfg.c, kappa / cfg.c, 1.0)?;
            let l = cfg.box_len.unwrap_or(PI * cfg.n as f64 / (4.0 * 2f64.powi(k)));
            let g = build_grid(cfg.n, l, kappa)?;
            let ones = vec![C64::new(1.0, 0.0); g.len()];
            let loc = rotating_euler::LocSpec::shell(k);
            for &tf in &cfg.t_finals {
                let s = strichartz_norm(&g, &ones, &loc, branch, &p, cfg.q.0, cfg.r.0, tf, cfg.nt)?;
                rep.row(vec![
                    k.to_string(),
                    num(kappa),
                    num(l),
                    num(tf),
                    s.nt.to_string(),
                    num(s.norm),
                    num(s.bound),
                    num(s.ratio),
                    num(s.l2),
                ]);
            }
        }
    }
    Ok(rep.into())
}

pub fn kernel(cfg: &Kernel) -> CliResult<Outcome> {
    let loc = cfg.loc.spec();
    let branch = cfg.branch.branch();
    let jobs: Vec<(f64, [f64; 3])> = cfg.times.iter().flat_map(|&t| cfg.points.iter().map(move |&x| (t, x))).collect();
    let vals: Vec<CliResult<C64>> =
        jobs.par_iter().map(|&(t, x)| kernel_quadrature(&loc, branch, cfg.kappa, t, x).map_err(CliError::from)).collect();
    let mut rep = Report::new("kernel", cfg, &["t", "x1", "x2", "x3", "re", "im", "abs"]);
    rep.note(format!("loc {}, branch {}, c = 1", loc.label(), branch.name()));
    for ((t, x), v) in jobs.into_iter().zip(vals) {
        let v = v?;
        rep.row(vec![num(t), num(x[0]), num(x[1]), num(x[2]), num(v.re), num(v.im), num(v.norm())]);
    }
    Ok(rep.into())
}

pub fn optimal(cfg: &OptimalDecay) -> CliResult<Outcome> {
    let p = params(cfg.c, cfg.eps, 1.0)?;
    let mut rep = Report::new(
        "optimal-decay",
        cfg,
        &["t", "value", "lower_bound", "holds", "direct_abs_diff", "value_omega_sign"],
    );
    let mut gate = true;
    for &t in &cfg.times {
        let v = optimal_decay(&p, t, false)?;
        let diff = if cfg.direct { (optimal_decay_direct(&p, t, false)? - v.integral).norm() } else { f64::NAN };
        let o = optimal_decay(&p, t, true)?;
        gate &= v.holds();
        rep.row(vec![num(t), num(v.value), num(v.lower_bound), v.holds().to_string(), num(diff), num(o.value)]);
    }
    rep.note(format!("all values above the lower bound: {gate}"));
    Ok(Outcome { report: rep, gate })
}

fn initial_state(cfg: &Simulate, g: &SpectralGrid) -> CliResult<StateW> {
    match cfg.data {
        InitialData::Sideris { amplitude, radius, width, direction } => {
            let mut d = SiderisData::new(amplitude, cfg.box_len);
            d.radius = radius.unwrap_or(d.radius);
            d.width = width.unwrap_or(d.width);
            d.direction = direction.unwrap_or(d.direction);
            Ok(d.state(g)?)
        }
        InitialData::Random { amplitude } => {
            // keep only |m| ≤ 3 so the data are smooth on every grid
            let w = random::state(g, cfg.seed)?;
            let n = g.n();
            Ok(w.map_freq(|idx, v| {
                let (i, j, l) = g.split(idx);
                let low = [i, j, l].iter().all(|&a| g.mode(a).abs() <= 3 && !(a == n / 2));
                if low {
                    v.map(|c| c * amplitude)
                } else {
                    [C64::new(0.0, 0.0); 4]
                }
            }))
        }
    }
}

fn solver_config(cfg: &Simulate) -> CliResult<(SolverConfig, StateW)> {
    let p = params(cfg.physics.c, cfg.physics.eps.0, cfg.physics.alpha)?;
    let g = build_grid(cfg.n, cfg.box_len, p.kappa())?;
    let w0 = initial_state(cfg, &g)?;
    let mut sc = SolverConfig::new(p, g, cfg.t_end);
    sc.dealias = cfg.dealias;
    sc.s_monitor = cfg.s_monitor;
    sc.blowup_threshold = cfg.threshold.threshold();
    sc.cfl_safety = cfg.cfl_safety;
    sc.tail_limit = cfg.tail_limit;
    sc.dt = sc.max_dt();
    if let Some(dt) = cfg.dt {
        sc.dt = dt;
    }
    sc.validate()?;
    Ok((sc, w0))
}

pub fn run_simulation(cfg: &Simulate) -> CliResult<Outcome> {
    let (sc, w0) = solver_config(cfg)?;
    let tr = simulate(&w0, &sc)?;
    let mut rep = Report::new("simulate", cfg, &["t", "hs_norm", "grad_sup", "b", "energy", "tail_fraction"]);
    rep.note(format!("termination: {} at t = {}", tr.termination.name(), num(tr.t_final())));
    rep.note(format!("dt: {}", num(tr.dt)));
    if cfg.gronwall {
        match gronwall_check(&tr) {
            Ok(f) => rep.note(format!("gronwall K: {} (max B increment {})", num(f.k), num(f.max_db))),
            Err(e) => rep.note(format!("gronwall K: unavailable ({e})")),
        }
    }
    for s in &tr.samples {
        rep.row(vec![num(s.t), num(s.hs_norm), num(s.grad_sup), num(s.b), num(s.energy), num(s.tail)]);
    }
    Ok(rep.into())
}

pub fn lifespan(cfg: &LifespanSweep) -> CliResult<Outcome> {
    let (sc, w0) = solver_config(&cfg.run)?;
    let eps: Vec<f64> = cfg.eps_list.iter().map(|e| e.0).collect();
    let rows = lifespan_sweep(&w0, &sc, &eps, cfg.q)?;
    let mut rep = Report::new(
        "lifespan-sweep",
        cfg,
        &["eps", "t_star", "termination", "lower_bound_only", "predicted_scaling", "dt"],
    );
    rep.note("predicted_scaling: eps^(-1/(q-1)) * min(1, (c eps)^(3/(q-1))), unknown constant omitted");
    for r in rows {
        rep.row(vec![
            num(r.eps),
            num(r.t_star),
            r.termination.name().into(),
            r.lower_bound_only.to_string(),
            num(r.predicted),
            num(r.dt),
        ]);
    }
    Ok(rep.into())
}

/// Quick versions of the invariant suites.
pub fn selftest(cfg: &Selftest) -> CliResult<Outcome> {
    let mut rep = Report::new("selftest", cfg, &["check", "value", "tolerance", "pass"]);
    let mut gate = true;
    let mut check = |rep: &mut Report, name: &str, v: f64, tol: f64| {
        let ok = v <= tol;
        gate &= ok;
        rep.row(vec![name.into(), num(v), num(tol), ok.to_string()]);
    };

    // eigenpairs: M·(synthesized unit amplitude) = iτ·(same)
    let mut rng = random::rng(cfg.seed);
    let mut eig: f64 = 0.0;
    for _ in 0..50 {
        let xi = random::vec3(&mut rng, -3.0, 3.0);
        let m = matrix_m(&Freq::from(xi), 1.0)?;
        let f = Frame::new(xi, 1.0).ok_or_else(|| CliError::Numerical("zero frequency drawn".into()))?;
        for (j, tau) in f.taus().iter().enumerate() {
            let mut u = [C64::new(0.0, 0.0); 4];
            u[j] = C64::new(1.0, 0.0);
            let y = f.synthesize(u);
            for (row, yr) in m.iter().zip(&y) {
                let my: C64 = row.iter().zip(&y).map(|(a, b)| a * b).sum();
                eig = eig.max((my - C64::new(0.0, *tau) * yr).norm());
            }
        }
    }
    check(&mut rep, "eigenpairs of M", eig, 1e-12);

    let g = build_grid(16, 2.0 * PI, 1.0)?;
    let frames = Frames::new(&g, 1.0)?;
    let w = random::state(&g, cfg.seed)?;
    let m = to_modes_with(&frames, &w)?;
    let (a, b) = (state_l2(&g, &w)?, 2.0 * m.l2_norm(&g));
    check(&mut rep, "isometry |W| = 2|U|", (a - b).abs() / a, 1e-12);
    check(&mut rep, "mode round trip", from_modes_with(&frames, &m)?.max_rel_diff(&w), 1e-12);

    let p = params(1.0, 0.5, 1.0 / 3.0)?;
    let g = build_grid(16, 2.0 * PI * 1.05, p.kappa())?;
    let mut sc = SolverConfig::new(p, g.clone(), 0.5);
    sc.nonlinear = false;
    let solver = Solver::new(sc.clone())?;
    let mut w = initial_state(&Simulate { data: InitialData::Random { amplitude: 0.1 }, seed: cfg.seed, ..Default::default() }, &g)?;
    solver.dealias(&mut w);
    let a = solver.step(&w, sc.dt)?;
    let b = evolve_linear(&g, &w, &p, sc.dt)?;
    check(&mut rep, "integrating factor exactness", a.max_rel_diff(&b), 1e-13);

    sc.nonlinear = true;
    let tr = simulate(&w, &sc)?;
    let e0 = tr.samples[0].energy;
    let drift = tr.samples.iter().map(|s| (s.energy / e0 - 1.0).abs()).fold(0.0, f64::max);
    let done = if tr.termination == Termination::Completed { 0.0 } else { 1.0 };
    check(&mut rep, "short run completes", done, 0.0);
    check(&mut rep, "energy drift 16^3 to t = 0.5", drift, 1e-5);

    let p = params(1.0, 1.0, 1.0)?;
    let v = optimal_decay(&p, 20.0, false)?;
    check(&mut rep, "optimal decay closed form vs quadrature", (optimal_decay_direct(&p, 20.0, false)? - v.integral).norm(), 1e-10);
    check(&mut rep, "optimal decay above bound at t = 20", (v.lower_bound - v.value).max(0.0), 0.0);

    Ok(Outcome { report: rep, gate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_exit_classes() {
        assert!(matches!(CliError::from(Error::Invalid("x".into())), CliError::Validation(_)));
        assert!(matches!(CliError::from(Error::Singular([0.0; 3])), CliError::Validation(_)));
        assert!(matches!(CliError::from(Error::Numerical("x".into())), CliError::Numerical(_)));
    }

    #[test]
    fn random_data_are_low_mode_and_real() {
        let cfg = Simulate { n: 16, data: InitialData::Random { amplitude: 1.0 }, ..Default::default() };
        let g = build_grid(16, cfg.box_len, 1.0).unwrap();
        let w = initial_state(&cfg, &g).unwrap();
        for idx in 0..g.len() {
            let (i, j, l) = g.split(idx);
            if [i, j, l].iter().any(|&a| g.mode(a).abs() > 3) {
                assert!(w.at(idx).iter().all(|c| c.norm() == 0.0));
            }
            let m = w.at(g.neg_index(idx));
            for (a, b) in w.at(idx).iter().zip(m) {
                assert!((a - b.conj()).norm() < 1e-12);
            }
        }
    }
}
