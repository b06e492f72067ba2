//! One-dimensional quadrature: Gauss–Legendre rules, globally adaptive
//! Gauss–Kronrod (7/15), and `J₀` from its integral representation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::C64;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(t) and P_n'(t) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { t } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (t * pn - pm) / (t * t - 1.0);
            let dt = pn / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let d = h * XGK[j];
        let s = f(c - d) + f(c + d);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Piece {
    a: f64,
    b: f64,
    val: C64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive G7/K15 quadrature of a complex integrand on `[a, b]`,
/// splitting the worst interval until the summed error estimate is below
/// `abs_tol`. Fails when `max_pieces` is exhausted.
pub fn adaptive<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, abs_tol: f64, max_pieces: usize) -> Result<C64> {
    if !(a.is_finite() && b.is_finite()) {
        return invalid("integration limits must be finite");
    }
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut heap = BinaryHeap::new();
    let (val, err) = gk15(&f, a, b);
    let mut total = val;
    let mut total_err = err;
    heap.push(Piece { a, b, val, err });
    loop {
        if !(total_err.is_finite() && total.re.is_finite() && total.im.is_finite()) {
            return Err(Error::Numerical("adaptive quadrature: non-finite integrand".into()));
        }
        if total_err <= abs_tol {
            break;
        }
        if heap.len() >= max_pieces {
            return Err(Error::Numerical(format!(
                "adaptive quadrature: error {total_err:.3e} above {abs_tol:.3e} after {max_pieces} pieces"
            )));
        }
        let p = heap.pop().expect("nonempty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            return Err(Error::Numerical("adaptive quadrature: interval underflow".into()));
        }
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        total += v1 + v2 - p.val;
        total_err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Piece { a: m, b: p.b, val: v2, err: e2 });
        // guard against drift in the running sums
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.val).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok(heap.iter().map(|p| p.val).sum())
}

/// `J₀(x) = (1/π)∫₀^π cos(x sin θ) dθ`, by 64-point Gauss–Legendre panels,
/// doubled until two successive estimates agree.
pub fn bessel_j0(x: f64) -> f64 {
    thread_local! {
        static RULE: (Vec<f64>, Vec<f64>) = gauss_legendre(64);
    }
    let x = x.abs();
    RULE.with(|(nodes, weights)| {
        // the integrand is symmetric about π/2
        let eval = |panels: usize| {
            let h = 0.5 * PI / panels as f64;
            let mut acc = 0.0;
            for p in 0..panels {
                let lo = p as f64 * h;
                for (t, w) in nodes.iter().zip(weights) {
                    acc += w * (x * (lo + 0.5 * h * (t + 1.0)).sin()).cos();
                }
            }
            acc * h / PI
        };
        let mut panels = 1 + (x / 16.0).ceil() as usize;
        let mut prev = eval(panels);
        loop {
            panels *= 2;
            let next = eval(panels);
            if (next - prev).abs() <= 1e-15 || panels > 1 << 16 {
                return next;
            }
            prev = next;
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [1, 2, 5, 8, 20, 64] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n {n} deg {deg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn adaptive_oscillatory() {
        // ∫₀^π e^{i 40 x} x dx
        let got = adaptive(|x| C64::new(0.0, 40.0 * x).exp() * x, 0.0, PI, 1e-12, 10_000).unwrap();
        let k = 40.0;
        let i = C64::new(0.0, 1.0);
        let e = (i * k * PI).exp();
        let want = e * PI / (i * k) + (e - 1.0) / (k * k);
        assert!((got - want).norm() < 1e-11);
    }

    #[test]
    fn adaptive_budget_exhaustion() {
        assert!(adaptive(|x| C64::new(1.0 / x.abs().sqrt(), 0.0), -1.0, 1.0, 1e-14, 20).is_err());
    }

    #[test]
    fn j0_reference_values() {
        // Abramowitz & Stegun table values
        for (x, want) in [
            (0.0, 1.0),
            (1.0, 0.765_197_686_557_966_6),
            (2.404_825_557_695_773, 0.0),
            (10.0, -0.245_935_764_451_348_3),
            (100.0, 0.019_985_850_304_223_12),
        ] {
            assert!((bessel_j0(x) - want).abs() < 1e-14, "J0({x}) = {}", bessel_j0(x));
        }
    }
}
