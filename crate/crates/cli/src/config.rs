//! JSON configuration for each subcommand. Every field has a default, so an
//! empty object (or no `--config` at all) is a valid configuration.

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use rotating_euler::localization::AxisLoc;
use rotating_euler::nonlinear::Threshold;
use rotating_euler::{Branch, BranchTag, LocSpec};

/// A float that may be `"inf"` in JSON, which has no infinity literal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v.to_ascii_lowercase().as_str() {
                    "inf" | "+inf" | "infinity" => Ok(Real(f64::INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchName {
    #[serde(rename = "+Sigma", alias = "Sigma")]
    SigmaPlus,
    #[serde(rename = "-Sigma")]
    SigmaMinus,
    #[serde(rename = "+Omega", alias = "Omega")]
    OmegaPlus,
    #[serde(rename = "-Omega")]
    OmegaMinus,
    #[serde(rename = "+OmegaInc", alias = "OmegaInc")]
    OmegaIncPlus,
    #[serde(rename = "-OmegaInc")]
    OmegaIncMinus,
}

impl BranchName {
    pub fn branch(self) -> Branch {
        let (tag, sign) = match self {
            BranchName::SigmaPlus => (BranchTag::Sigma, 1),
            BranchName::SigmaMinus => (BranchTag::Sigma, -1),
            BranchName::OmegaPlus => (BranchTag::Omega, 1),
            BranchName::OmegaMinus => (BranchTag::Omega, -1),
            BranchName::OmegaIncPlus => (BranchTag::OmegaInc, 1),
            BranchName::OmegaIncMinus => (BranchTag::OmegaInc, -1),
        };
        Branch { tag, sign }
    }
}

/// `l` is an integer, `"at_most_p"`, or absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocConfig {
    pub k: i32,
    #[serde(default)]
    pub p: Option<i32>,
    #[serde(default)]
    pub q: Option<i32>,
    #[serde(default)]
    pub l: Option<AxisLocConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisLocConfig {
    L(i32),
    Named(AxisLocName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisLocName {
    AtMostP,
}

impl LocConfig {
    pub fn spec(&self) -> LocSpec {
        let l = match self.l {
            None => AxisLoc::None,
            Some(AxisLocConfig::L(l)) => AxisLoc::L(l),
            Some(AxisLocConfig::Named(AxisLocName::AtMostP)) => AxisLoc::AtMostP,
        };
        LocSpec { k: self.k, p: self.p, q: self.q, l }
    }
}

impl Default for LocConfig {
    fn default() -> Self {
        LocConfig { k: 0, p: None, q: None, l: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdConfig {
    Relative(f64),
    Absolute(f64),
}

impl ThresholdConfig {
    pub fn threshold(self) -> Threshold {
        match self {
            ThresholdConfig::Relative(v) => Threshold::Relative(v),
            ThresholdConfig::Absolute(v) => Threshold::Absolute(v),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub c: f64,
    pub eps: Real,
    pub alpha: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics { c: 1.0, eps: Real(1.0), alpha: 1.0 / 3.0 }
    }
}

/// Points `min + j·(max − min)/(steps − 1)` per axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Lattice {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub steps: [usize; 3],
}

impl Default for Lattice {
    fn default() -> Self {
        Lattice { min: [0.0, 0.0, -2.0], max: [2.0, 0.0, 2.0], steps: [5, 1, 9] }
    }
}

impl Lattice {
    pub fn points(&self) -> Vec<[f64; 3]> {
        let axis = |a: usize| -> Vec<f64> {
            let s = self.steps[a];
            if s <= 1 {
                return vec![self.min[a]];
            }
            (0..s).map(|j| self.min[a] + (self.max[a] - self.min[a]) * j as f64 / (s - 1) as f64).collect()
        };
        let (xs, ys, zs) = (axis(0), axis(1), axis(2));
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for &x in &xs {
            for &y in &ys {
                for &z in &zs {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionTable {
    pub kappa: f64,
    pub lattice: Lattice,
}

impl Default for DispersionTable {
    fn default() -> Self {
        DispersionTable { kappa: 1.0, lattice: Lattice::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformCheck {
    pub n: usize,
    pub box_len: f64,
    pub kappa: f64,
    pub fields: usize,
    pub seed: u64,
}

impl Default for TransformCheck {
    fn default() -> Self {
        TransformCheck { n: 32, box_len: 2.0 * PI, kappa: 1.0, fields: 10, seed: 1 }
    }
}

/// Spectral data before localization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataShape {
    /// `f̂ = 1`
    Ones,
    /// `f̂ = ψ(|ξ|)`
    Psi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayCase {
    pub branch: BranchName,
    pub loc: LocConfig,
    #[serde(default = "default_shape")]
    pub data: DataShape,
}

fn default_shape() -> DataShape {
    DataShape::Ones
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Decay {
    pub n: usize,
    pub box_len: f64,
    pub c: f64,
    pub kappas: Vec<f64>,
    pub cases: Vec<DecayCase>,
    /// Geometric samples on `[t_min, t_max]`.
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    /// Fit window; defaults to the sampled range.
    pub window: Option<[f64; 2]>,
}

impl Default for Decay {
    fn default() -> Self {
        Decay {
            n: 128,
            box_len: 96.0,
            c: 1.0,
            kappas: vec![1.0],
            cases: vec![DecayCase { branch: BranchName::OmegaPlus, loc: LocConfig::default(), data: DataShape::Ones }],
            t_min: 5.0,
            t_max: 40.0,
            samples: 12,
            window: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Strichartz {
    pub n: usize,
    /// Defaults to `πn/(4·2^k)`, which puts the shell well inside the grid.
    pub box_len: Option<f64>,
    pub c: f64,
    pub kappas: Vec<f64>,
    pub ks: Vec<i32>,
    pub branch: BranchName,
    pub q: Real,
    pub r: Real,
    pub t_finals: Vec<f64>,
    pub nt: usize,
}

impl Default for Strichartz {
    fn default() -> Self {
        Strichartz {
            n: 64,
            box_len: None,
            c: 1.0,
            kappas: vec![1.0],
            ks: vec![0],
            branch: BranchName::OmegaPlus,
            q: Real(4.0),
            r: Real(4.0),
            t_finals: vec![10.0, 40.0],
            nt: 64,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Kernel {
    pub loc: LocConfig,
    pub branch: BranchName,
    pub kappa: f64,
    pub times: Vec<f64>,
    pub points: Vec<[f64; 3]>,
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel {
            loc: LocConfig::default(),
            branch: BranchName::OmegaPlus,
            kappa: 1.0,
            times: vec![0.0, 5.0, 10.0],
            points: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 2.0]],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimalDecay {
    pub c: f64,
    pub eps: f64,
    pub times: Vec<f64>,
    /// Cross-check every value against the two-dimensional quadrature.
    pub direct: bool,
}

impl Default for OptimalDecay {
    fn default() -> Self {
        OptimalDecay { c: 1.0, eps: 1.0, times: (2..=20).map(|j| 10.0 * j as f64).collect(), direct: true }
    }
}

/// Initial data for the solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// Radial pulse; radius and width default to `L/6` and `L/19`,
    /// `direction` to `+1` (outgoing).
    Sideris {
        amplitude: f64,
        #[serde(default)]
        radius: Option<f64>,
        #[serde(default)]
        width: Option<f64>,
        #[serde(default)]
        direction: Option<f64>,
    },
    /// Uniform random point values scaled by `amplitude`, seeded by `--seed`.
    Random { amplitude: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Simulate {
    pub n: usize,
    pub box_len: f64,
    pub physics: Physics,
    pub t_end: f64,
    /// Defaults to the largest stable step.
    pub dt: Option<f64>,
    pub dealias: bool,
    pub s_monitor: f64,
    pub threshold: ThresholdConfig,
    pub cfl_safety: f64,
    pub tail_limit: f64,
    pub data: InitialData,
    pub seed: u64,
    /// Append the fitted Gronwall constant to the header.
    pub gronwall: bool,
}

impl Default for Simulate {
    fn default() -> Self {
        Simulate {
            n: 32,
            box_len: 2.0 * PI * 1.05,
            physics: Physics::default(),
            t_end: 1.0,
            dt: None,
            dealias: true,
            s_monitor: 3.0,
            threshold: ThresholdConfig::Relative(50.0),
            cfl_safety: 0.9,
            tail_limit: 0.01,
            data: InitialData::Sideris { amplitude: 0.1, radius: None, width: None, direction: None },
            seed: 1,
            gronwall: true,
        }
    }
}

/// The run keys of [`Simulate`] sit at the top level next to `eps_list` and `q`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LifespanSweep {
    #[serde(flatten)]
    pub run: Simulate,
    pub eps_list: Vec<Real>,
    pub q: f64,
}

impl Default for LifespanSweep {
    fn default() -> Self {
        LifespanSweep {
            run: Simulate { gronwall: false, t_end: 2.0, ..Simulate::default() },
            eps_list: vec![Real(f64::INFINITY), Real(1.0), Real(0.5)],
            q: 3.0,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Selftest {
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_accepts_inf() {
        let v: Vec<Real> = serde_json::from_str(r#"["inf", 1, 0.5, "Infinity"]"#).unwrap();
        assert_eq!(v, vec![Real(f64::INFINITY), Real(1.0), Real(0.5), Real(f64::INFINITY)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["inf",1.0,0.5,"inf"]"#);
        assert!(serde_json::from_str::<Real>(r#""nan""#).is_err());
    }

    #[test]
    fn loc_forms() {
        let a: LocConfig = serde_json::from_str(r#"{"k": 1, "p": -1, "l": "at_most_p"}"#).unwrap();
        assert_eq!(a.spec().l, AxisLoc::AtMostP);
        let b: LocConfig = serde_json::from_str(r#"{"k": 0, "p": -2, "l": -1}"#).unwrap();
        assert_eq!(b.spec().l, AxisLoc::L(-1));
        assert!(serde_json::from_str::<LocConfig>(r#"{"k": 0, "m": 1}"#).is_err());
    }

    #[test]
    fn lattice_points() {
        let l = Lattice { min: [0.0, 0.0, -1.0], max: [1.0, 5.0, 1.0], steps: [2, 1, 3] };
        let p = l.points();
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], [0.0, 0.0, -1.0]);
        assert_eq!(p[5], [1.0, 0.0, 1.0]);
    }

    #[test]
    fn sweep_keys_are_flat() {
        let s: LifespanSweep = serde_json::from_str(r#"{"n": 16, "eps_list": ["inf", 2], "q": 3}"#).unwrap();
        assert_eq!(s.run.n, 16);
        assert_eq!(s.eps_list, vec![Real(f64::INFINITY), Real(2.0)]);
        assert_eq!(s.q, 3.0);
    }
}
