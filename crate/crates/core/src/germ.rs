//! Linearizable holomorphic germs `f = H ∘ R_α ∘ H⁻¹` fixing the origin.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linearizer `H` of a germ, normalized by `H(0) = 0`, `H'(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GermLinearizer {
    /// `H(w) = w / (1 - c w)`.
    Moebius { c: Complex64 },
    /// `H(w) = w + Σ_{k≥2} a_k w^k`, coefficients listed from `a_2`.
    Polynomial { coeffs: Vec<Complex64> },
}

impl GermLinearizer {
    pub fn eval(&self, w: Complex64) -> Complex64 {
        match self {
            GermLinearizer::Moebius { c } => w / (1.0 - c * w),
            GermLinearizer::Polynomial { coeffs } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in coeffs.iter().rev() {
                    acc = (acc + a) * w;
                }
                w + acc * w
            }
        }
    }

    pub fn deriv(&self, w: Complex64) -> Complex64 {
        match self {
            GermLinearizer::Moebius { c } => {
                let d = 1.0 - c * w;
                1.0 / (d * d)
            }
            GermLinearizer::Polynomial { coeffs } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, a) in coeffs.iter().enumerate().rev() {
                    acc = acc * w + a * (i + 2) as f64;
                }
                1.0 + acc * w
            }
        }
    }

    pub fn inverse(&self, z: Complex64) -> Result<Complex64> {
        match self {
            GermLinearizer::Moebius { c } => Ok(z / (1.0 + c * z)),
            GermLinearizer::Polynomial { .. } => {
                let mut w = z;
                for _ in 0..100 {
                    let step = (self.eval(w) - z) / self.deriv(w);
                    w -= step;
                    if step.norm() <= 1e-15 * (1.0 + w.norm()) {
                        break;
                    }
                }
                if (self.eval(w) - z).norm() <= 1e-13 * (1.0 + z.norm()) {
                    return Ok(w);
                }
                Err(Error::NonConvergence {
                    what: "germ linearizer inversion",
                    detail: format!("z = {z}"),
                })
            }
        }
    }

    /// Radius of the largest disk on which `H` is certified univalent: the
    /// pole for the Möbius form, a scan of the image curves for polynomials.
    pub fn certified_radius(&self) -> f64 {
        match self {
            GermLinearizer::Moebius { c } => {
                if c.norm() == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / c.norm()
                }
            }
            GermLinearizer::Polynomial { coeffs } if coeffs.iter().all(|a| a.norm() == 0.0) => {
                f64::INFINITY
            }
            GermLinearizer::Polynomial { .. } => {
                // image curves H(|w| = ρ) must turn monotonically
                let mut good = 0.0;
                let mut rho = 0.01;
                while rho < 100.0 {
                    let ok = (0..512).all(|j| {
                        let w = Complex64::from_polar(rho, TAU * j as f64 / 512.0);
                        (w * self.deriv(w) / self.eval(w)).re > 0.05
                    });
                    if !ok {
                        break;
                    }
                    good = rho;
                    rho *= 1.01;
                }
                good
            }
        }
    }
}

/// A germ with an irrationally indifferent fixed point at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Germ {
    pub alpha: f64,
    pub linearizer: GermLinearizer,
    /// Closed-form coefficient `b` of `f(z) = e^{2πiα} z / (1 - b z)` when the
    /// germ was built as a Möbius germ.
    pub moebius_b: Option<Complex64>,
}

impl Germ {
    pub fn linear(alpha: f64) -> Self {
        Germ {
            alpha,
            linearizer: GermLinearizer::Polynomial { coeffs: vec![] },
            moebius_b: None,
        }
    }

    /// `f(z) = e^{2πiα} z / (1 - b z)`, linearized by `H(w) = w/(1 - c w)`
    /// with `c = b / (e^{2πiα} - 1)`.
    pub fn moebius(alpha: f64, b: Complex64) -> Self {
        let lambda = Complex64::cis(TAU * alpha);
        Germ {
            alpha,
            linearizer: GermLinearizer::Moebius {
                c: b / (lambda - 1.0),
            },
            moebius_b: Some(b),
        }
    }

    pub fn multiplier(&self) -> Complex64 {
        Complex64::cis(TAU * self.alpha)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let lambda = self.multiplier();
        match self.moebius_b {
            Some(b) => Ok(lambda * z / (1.0 - b * z)),
            None => {
                let w = self.linearizer.inverse(z)?;
                Ok(self.linearizer.eval(lambda * w))
            }
        }
    }

    /// Conformal radius of the Siegel disk, `R = r(D, 0)`.
    pub fn siegel_radius(&self) -> f64 {
        self.linearizer.certified_radius()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_linearizer_conjugates_germ() {
        let alpha = crate::circlemap::GOLDEN_MEAN;
        let germ = Germ::moebius(alpha, Complex64::new(0.2, 0.0));
        let lambda = germ.multiplier();
        for j in 0..32 {
            let w = Complex64::from_polar(0.7, j as f64 * 0.2);
            let lhs = germ.linearizer.eval(lambda * w);
            let rhs = germ.eval(germ.linearizer.eval(w)).unwrap();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn polynomial_inverse_round_trips() {
        let h = GermLinearizer::Polynomial {
            coeffs: vec![Complex64::new(0.1, 0.05), Complex64::new(0.0, -0.02)],
        };
        let z = h.eval(Complex64::new(0.3, -0.4));
        let w = h.inverse(z).unwrap();
        assert!((w - Complex64::new(0.3, -0.4)).norm() < 1e-14);
        let r = h.certified_radius();
        assert!(r > 1.0 && r < 10.0);
    }
}
