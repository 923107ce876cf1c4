//! Run configuration: every default lives here, so acceptance runs are
//! single commands and `dump-config` shows exactly what a run will use.

use std::path::PathBuf;

use loewner_core::circlemap::{check_admissible, BRONZE_MEAN, SILVER_MEAN, SQRT3_MINUS_ONE};
use loewner_core::{
    flow, CircleMap, Complex64, ConformalConjugacy, Error, Germ, Grid, Result, GOLDEN_MEAN,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `g = R_α`; the germ suites use the linear germ.
    Rotation,
    /// `g = h∘R_α∘h⁻¹` with `h` the disk automorphism of parameter `a`.
    Moebius,
    /// Circle map of the Siegel compact of capacity 0 for the germ
    /// `H∘R_α∘H⁻¹`, `H(w) = w/(1 − b w)`.
    MoebiusGerm,
    /// `g = h∘R_α∘h⁻¹` with `h(w) = w exp(i Σ b_k w^k + conj(b_k) w^{-k})`.
    Fourier,
}

/// The Diophantine menu.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AlphaChoice {
    Golden,
    Silver,
    Bronze,
    Sqrt3Minus1,
}

impl AlphaChoice {
    pub fn value(self) -> f64 {
        match self {
            AlphaChoice::Golden => GOLDEN_MEAN,
            AlphaChoice::Silver => SILVER_MEAN,
            AlphaChoice::Bronze => BRONZE_MEAN,
            AlphaChoice::Sqrt3Minus1 => SQRT3_MINUS_ONE,
        }
    }
}

/// Pass thresholds of the verification suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub conformal_gap: f64,
    pub conformal_arcs: f64,
    pub fatou: f64,
    /// Relative error of the reconstructed singular mass.
    pub poltoratski_mass: f64,
    pub capacity: f64,
    pub joukowski: f64,
    /// Allowed deviation of observed convergence orders.
    pub order: f64,
    pub tangency: f64,
    pub loewner: f64,
    pub loewner_c0: f64,
    pub semigroup: f64,
    pub euler_gap: f64,
    pub rotation_drift: f64,
    pub backward: f64,
    pub backward_capacity: f64,
    pub radius: f64,
    pub herglotz_infinity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            conformal_gap: 1e-8,
            conformal_arcs: 1e-8,
            fatou: 1e-6,
            poltoratski_mass: 0.05,
            capacity: 1e-8,
            joukowski: 1e-8,
            order: 0.2,
            tangency: 1e-8,
            loewner: 1e-3,
            loewner_c0: 1e-6,
            semigroup: 1e-7,
            euler_gap: 1e-3,
            rotation_drift: 1e-3,
            backward: 1e-3,
            backward_capacity: 1e-8,
            radius: 1e-4,
            herglotz_infinity: 1e-6,
        }
    }
}

impl Tolerances {
    /// Overrides one field from a `name=value` pair.
    pub fn set(&mut self, assignment: &str) -> std::result::Result<(), String> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| format!("tolerance override must read name=value, got {assignment:?}"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|e| format!("tolerance {name}: {e}"))?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(format!("tolerance {name} must be positive and finite"));
        }
        let mut map = match serde_json::to_value(&*self) {
            Ok(serde_json::Value::Object(map)) => map,
            _ => unreachable!("tolerances serialize to an object"),
        };
        let slot = map
            .get_mut(name.trim())
            .ok_or_else(|| format!("unknown tolerance {name:?}"))?;
        *slot = value.into();
        *self = serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| e.to_string())?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Grid half-size; the circle carries `2N` nodes.
    pub n: usize,
    pub seed: u64,
    pub family: FamilyKind,
    /// Möbius parameter `a` as `[re, im]`.
    pub a: [f64; 2],
    /// Germ parameter `b` as `[re, im]`.
    pub b: [f64; 2],
    /// Fourier-family coefficients `b_k`, `k >= 1`.
    pub coeffs: Vec<[f64; 2]>,
    pub alpha: AlphaChoice,
    /// Conformal exponent.
    pub s: f64,
    pub out: PathBuf,
    pub tol: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 1024,
            seed: 20240917,
            family: FamilyKind::Moebius,
            a: [0.3, 0.0],
            b: [0.2, 0.0],
            coeffs: vec![[0.05, 0.0], [0.0, 0.02]],
            alpha: AlphaChoice::Golden,
            s: 2.0,
            out: PathBuf::from("out"),
            tol: Tolerances::default(),
        }
    }
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 8 {
            return Err(Error::InvalidArgument(format!(
                "grid N must be a power of two >= 8, got {}",
                self.n
            )));
        }
        if !self.s.is_finite() {
            return Err(Error::InvalidArgument("conformal exponent must be finite".into()));
        }
        if complex(self.a).norm() >= 1.0 {
            return Err(Error::InvalidArgument("Möbius parameter needs |a| < 1".into()));
        }
        if !(complex(self.b).norm() < 1.0) {
            return Err(Error::InvalidArgument("germ parameter needs |b| < 1".into()));
        }
        check_admissible(self.alpha.value())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.n)
    }

    pub fn alpha_value(&self) -> f64 {
        self.alpha.value()
    }

    /// The circle map selected by the family.
    pub fn circle_map(&self) -> Result<CircleMap> {
        let alpha = self.alpha_value();
        let grid = self.grid();
        match self.family {
            FamilyKind::Rotation => CircleMap::rotation(alpha, grid),
            FamilyKind::Moebius => {
                let h = ConformalConjugacy::moebius(complex(self.a))?;
                CircleMap::linearizable(alpha, h, grid)
            }
            FamilyKind::MoebiusGerm => Ok(flow::germ_state(&self.germ()?, 0.0, grid)?.map),
            FamilyKind::Fourier => {
                let h = ConformalConjugacy::fourier(self.coeffs.iter().map(|&c| complex(c)).collect())?;
                CircleMap::linearizable(alpha, h, grid)
            }
        }
    }

    /// The germ driving the Siegel-compact suites: linear for the rotation
    /// family, otherwise the Möbius germ of parameter `b`.
    pub fn germ(&self) -> Result<Germ> {
        let alpha = self.alpha_value();
        match self.family {
            FamilyKind::Rotation => Ok(Germ::linear(alpha)),
            FamilyKind::Moebius | FamilyKind::MoebiusGerm => Ok(Germ::moebius(alpha, complex(self.b))),
            FamilyKind::Fourier => Err(Error::InvalidArgument(
                "the Fourier family has no germ; use --family moebius-germ".into(),
            )),
        }
    }

    /// Parameters recorded in every report.
    pub fn params(&self) -> serde_json::Map<String, serde_json::Value> {
        let mut p = serde_json::Map::new();
        p.insert("n".into(), self.n.into());
        p.insert("seed".into(), self.seed.into());
        p.insert("family".into(), serde_json::to_value(self.family).unwrap_or_default());
        p.insert("alpha".into(), serde_json::to_value(self.alpha).unwrap_or_default());
        match self.family {
            FamilyKind::Rotation => {}
            FamilyKind::Moebius => {
                p.insert("a".into(), serde_json::to_value(self.a).unwrap_or_default());
                p.insert("b".into(), serde_json::to_value(self.b).unwrap_or_default());
            }
            FamilyKind::MoebiusGerm => {
                p.insert("b".into(), serde_json::to_value(self.b).unwrap_or_default());
            }
            FamilyKind::Fourier => {
                p.insert("coeffs".into(), serde_json::to_value(&self.coeffs).unwrap_or_default());
            }
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn tolerance_override() {
        let mut t = Tolerances::default();
        t.set("semigroup=1e-9").unwrap();
        assert_eq!(t.semigroup, 1e-9);
        assert!(t.set("nonsense=1").is_err());
        assert!(t.set("fatou=-1").is_err());
        assert!(t.set("fatou").is_err());
    }

    #[test]
    fn rejects_bad_grid() {
        let cfg = RunConfig {
            n: 1000,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
