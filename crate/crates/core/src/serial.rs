//! JSON form of circle maps:
//! `{alpha, coeffs: [[re, im], ...], annulus: [rho_in, rho_out], linearizer?}`.
//!
//! `coeffs` lists `c_{-K} .. c_K`. Floats go through serde_json's shortest
//! round-trip formatting, so encode/decode is bit-faithful.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circlemap::{CircleMap, Provenance, RotationNumber};
use crate::conjugacy::{Annulus, ConformalConjugacy};
use crate::error::{Error, Result};
use crate::spectral::{Grid, Laurent};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMapJson {
    pub alpha: f64,
    pub provenance: Provenance,
    /// Grid half-size `N`.
    pub n: usize,
    pub coeffs: Vec<[f64; 2]>,
    pub annulus: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linearizer: Option<ConformalConjugacy>,
}

impl From<&CircleMap> for CircleMapJson {
    fn from(g: &CircleMap) -> Self {
        let ann = g.annulus();
        CircleMapJson {
            alpha: g.alpha(),
            provenance: g.rotation_number().provenance,
            n: g.grid().n,
            coeffs: g.series().coefficients().iter().map(|c| [c.re, c.im]).collect(),
            annulus: [ann.inner, ann.outer],
            linearizer: g.linearizer().cloned(),
        }
    }
}

impl TryFrom<CircleMapJson> for CircleMap {
    type Error = Error;

    fn try_from(j: CircleMapJson) -> Result<Self> {
        if j.coeffs.len() % 2 == 0 {
            return Err(Error::InvalidArgument("coefficient list must have odd length".into()));
        }
        if !j.n.is_power_of_two() || j.n < 4 {
            return Err(Error::InvalidArgument(format!("grid N must be a power of two, got {}", j.n)));
        }
        let coeffs = j.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect();
        Ok(CircleMap::from_parts(
            Grid::new(j.n),
            Laurent::from_symmetric(coeffs),
            Annulus {
                inner: j.annulus[0],
                outer: j.annulus[1],
            },
            RotationNumber {
                value: j.alpha,
                provenance: j.provenance,
            },
            j.linearizer,
        ))
    }
}

pub fn to_json(g: &CircleMap) -> Result<String> {
    Ok(serde_json::to_string(&CircleMapJson::from(g))?)
}

pub fn from_json(s: &str) -> Result<CircleMap> {
    serde_json::from_str::<CircleMapJson>(s)?.try_into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circlemap::GOLDEN_MEAN;

    #[test]
    fn round_trip_is_bit_faithful() {
        let h = ConformalConjugacy::moebius(Complex64::new(0.3, -0.1)).unwrap();
        let g = CircleMap::linearizable(GOLDEN_MEAN, h, Grid::new(64)).unwrap();
        let back = from_json(&to_json(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
