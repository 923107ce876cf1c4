//! Analytic conjugacies of the unit circle and the interior parametrizations
//! used to build hulls from them.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::confmap::ExteriorMap;
use crate::error::{Error, Result};
use crate::germ::GermLinearizer;
use crate::spectral::{self, Grid};

/// Open annulus `inner < |z| < outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub const MAX_RADIUS: f64 = 1e3;

    pub fn symmetric(outer: f64) -> Self {
        let outer = outer.min(Self::MAX_RADIUS);
        Annulus {
            inner: 1.0 / outer,
            outer,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r > self.inner * (1.0 - 1e-12) && r < self.outer * (1.0 + 1e-12)
    }

    pub fn intersect(&self, other: &Annulus) -> Annulus {
        Annulus {
            inner: self.inner.max(other.inner),
            outer: self.outer.min(other.outer),
        }
    }
}

/// Schwarz reflection of a circle-preserving map: `1 / conj(f(1 / conj w))`.
fn reflect(f: impl Fn(Complex64) -> Result<Complex64>, w: Complex64) -> Result<Complex64> {
    let star = w.conj().inv();
    Ok(f(star)?.conj().inv())
}

fn reflect_deriv(
    f: impl Fn(Complex64) -> Result<Complex64>,
    df: impl Fn(Complex64) -> Result<Complex64>,
    w: Complex64,
) -> Result<Complex64> {
    let star = w.conj().inv();
    let v = f(star)?.conj();
    Ok(df(star)?.conj() / (w * w * v * v))
}

/// Map `h` conjugating the rigid rotation to a circle map, `g = h ∘ R_α ∘ h⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConformalConjugacy {
    Identity,
    /// `h(w) = (w + a) / (1 + conj(a) w)`, `|a| < 1`.
    Moebius { a: Complex64 },
    /// `h(w) = w exp(i u(w))`, `u(w) = Σ_k b_k w^k + conj(b_k) w^{-k}`,
    /// coefficients listed from `k = 1`.
    FourierPerturbation { coeffs: Vec<Complex64> },
    /// `h(w) = ψ(P(w))` for `|w| >= 1`, reflected inside: the inverse welding
    /// of a hull bounded by `P(S¹)` with exterior map `φ = ψ⁻¹`.
    Welded(Box<Welded>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Welded {
    pub exterior: ExteriorMap,
    pub inner: InnerMap,
}

impl ConformalConjugacy {
    pub fn moebius(a: Complex64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "Möbius parameter must satisfy |a| < 1, got {a}"
            )));
        }
        Ok(ConformalConjugacy::Moebius { a })
    }

    pub fn fourier(coeffs: Vec<Complex64>) -> Result<Self> {
        let h = ConformalConjugacy::FourierPerturbation { coeffs };
        if h.annulus().outer <= 1.0 {
            return Err(Error::NotUnivalent(
                "Fourier perturbation is not a circle diffeomorphism".into(),
            ));
        }
        Ok(h)
    }

    pub fn forward(&self, w: Complex64) -> Result<Complex64> {
        match self {
            ConformalConjugacy::Identity => Ok(w),
            ConformalConjugacy::Moebius { a } => Ok((w + a) / (1.0 + a.conj() * w)),
            ConformalConjugacy::FourierPerturbation { coeffs } => {
                Ok(w * (Complex64::i() * perturbation(coeffs, w)).exp())
            }
            ConformalConjugacy::Welded(wd) => {
                if w.norm() >= 1.0 - 1e-12 {
                    wd.exterior.inverse(wd.inner.point(w)?)
                } else {
                    reflect(|v| self.forward(v), w)
                }
            }
        }
    }

    pub fn deriv(&self, w: Complex64) -> Result<Complex64> {
        match self {
            ConformalConjugacy::Identity => Ok(Complex64::new(1.0, 0.0)),
            ConformalConjugacy::Moebius { a } => {
                let d = 1.0 + a.conj() * w;
                Ok((1.0 - a.norm_sqr()) / (d * d))
            }
            ConformalConjugacy::FourierPerturbation { coeffs } => {
                let e = (Complex64::i() * perturbation(coeffs, w)).exp();
                Ok(e * (1.0 + Complex64::i() * w * perturbation_deriv(coeffs, w)))
            }
            ConformalConjugacy::Welded(wd) => {
                if w.norm() >= 1.0 - 1e-12 {
                    let z = self.forward(w)?;
                    Ok(wd.inner.deriv(w)? / wd.exterior.deriv_unchecked(z))
                } else {
                    reflect_deriv(|v| self.forward(v), |v| self.deriv(v), w)
                }
            }
        }
    }

    pub fn inverse(&self, z: Complex64) -> Result<Complex64> {
        match self {
            ConformalConjugacy::Identity => Ok(z),
            ConformalConjugacy::Moebius { a } => Ok((z - a) / (1.0 - a.conj() * z)),
            ConformalConjugacy::FourierPerturbation { coeffs } => {
                // angle equation on the circle first, then complex Newton
                let mut theta = z.arg();
                for _ in 0..60 {
                    let e = Complex64::cis(theta);
                    let u = perturbation(coeffs, e).re;
                    let du = (Complex64::i() * e * perturbation_deriv(coeffs, e)).re;
                    let step = (theta + u - z.arg() + std::f64::consts::PI)
                        .rem_euclid(TAU)
                        - std::f64::consts::PI;
                    theta -= step / (1.0 + du);
                    if step.abs() < 1e-16 {
                        break;
                    }
                }
                let mut w = Complex64::from_polar(z.norm(), theta);
                for _ in 0..100 {
                    let step = (self.forward(w)? - z) / self.deriv(w)?;
                    w -= step;
                    if step.norm() <= 1e-15 * w.norm() {
                        break;
                    }
                }
                if (self.forward(w)? - z).norm() <= 1e-13 * z.norm() {
                    return Ok(w);
                }
                Err(Error::NonConvergence {
                    what: "Fourier conjugacy inversion",
                    detail: format!("z = {z}"),
                })
            }
            ConformalConjugacy::Welded(wd) => {
                if z.norm() >= 1.0 - 1e-12 {
                    wd.inner.preimage(wd.exterior.eval_unchecked(z))
                } else {
                    reflect(|v| self.inverse(v), z)
                }
            }
        }
    }

    /// Annulus on which forward and inverse are certified.
    pub fn annulus(&self) -> Annulus {
        match self {
            ConformalConjugacy::Identity => Annulus::symmetric(Annulus::MAX_RADIUS),
            ConformalConjugacy::Moebius { a } => {
                if a.norm() == 0.0 {
                    Annulus::symmetric(Annulus::MAX_RADIUS)
                } else {
                    Annulus::symmetric(1.0 / a.norm())
                }
            }
            ConformalConjugacy::FourierPerturbation { coeffs } => {
                // image curves h(|w| = r) must turn monotonically; the same
                // quantity Re(w h'/h) controls radial monotonicity
                let turning = |r: f64| turning_samples(coeffs, r).iter().all(|q| *q > 0.05);
                if !turning(1.0) {
                    return Annulus {
                        inner: 1.0,
                        outer: 1.0,
                    };
                }
                let mut good = 1.0;
                let mut r: f64 = 1.0;
                while r < 4.0 {
                    r += 0.005;
                    if !turning(r) || !turning(1.0 / r) {
                        break;
                    }
                    good = r;
                }
                Annulus::symmetric(good)
            }
            ConformalConjugacy::Welded(wd) => Annulus::symmetric(wd.inner.outer_limit()),
        }
    }

    /// Coefficients `b_k`, `k ≥ 1`, of a [`ConformalConjugacy::FourierPerturbation`]
    /// agreeing with `self` on the circle up to a precomposed rotation,
    /// sampled on `grid`.
    pub fn fourier_form(&self, grid: Grid) -> Result<Vec<Complex64>> {
        if let ConformalConjugacy::FourierPerturbation { coeffs } = self {
            return Ok(coeffs.clone());
        }
        let theta = grid.angles();
        let mut lift = grid
            .points()
            .into_iter()
            .map(|w| Ok(self.forward(w)?.arg()))
            .collect::<Result<Vec<_>>>()?;
        spectral::unwrap(&mut lift);
        let v: Vec<f64> = lift.iter().zip(&theta).map(|(h, t)| h - t).collect();
        Ok(mean_free_coefficients(&v))
    }

    pub fn is_identity(&self) -> bool {
        match self {
            ConformalConjugacy::Identity => true,
            ConformalConjugacy::Moebius { a } => a.norm() == 0.0,
            ConformalConjugacy::FourierPerturbation { coeffs } => {
                coeffs.iter().all(|c| c.norm() == 0.0)
            }
            ConformalConjugacy::Welded(_) => false,
        }
    }
}

/// Positive-frequency coefficients of `θ ↦ v(θ − m) − m`, `m = mean(v)`:
/// the mean-free lift of `h∘R_{-m}` when `v` is the lift of `h`.
pub(crate) fn mean_free_coefficients(v: &[f64]) -> Vec<Complex64> {
    let m = v.len();
    let c = spectral::forward_real(v);
    let shift = c[0].re;
    let half = m / 2 - 1;
    let mut out: Vec<Complex64> = (1..=half)
        .map(|k| c[k] * Complex64::cis(-(k as f64) * shift))
        .collect();
    while out.last().is_some_and(|b| b.norm() < 1e-16) {
        out.pop();
    }
    out
}

/// `Re(1 + i w u'(w))` on `|w| = r`, evaluated by FFT.
fn turning_samples(coeffs: &[Complex64], r: f64) -> Vec<f64> {
    let m = (4 * coeffs.len()).next_power_of_two().max(1024);
    let mut c = vec![Complex64::new(0.0, 0.0); m];
    c[0] = Complex64::new(1.0, 0.0);
    let mut rk = 1.0;
    for (i, b) in coeffs.iter().enumerate() {
        let k = i + 1;
        rk *= r;
        let ik = Complex64::new(0.0, k as f64);
        c[k] += ik * b * rk;
        c[m - k] -= ik * b.conj() / rk;
    }
    spectral::inverse(&c).into_iter().map(|q| q.re).collect()
}

fn perturbation(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    let inv = w.inv();
    let (mut p, mut q) = (w, inv);
    let mut acc = Complex64::new(0.0, 0.0);
    for b in coeffs {
        acc += b * p + b.conj() * q;
        p *= w;
        q *= inv;
    }
    acc
}

fn perturbation_deriv(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    let inv = w.inv();
    let (mut p, mut q) = (Complex64::new(1.0, 0.0), inv * inv);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, b) in coeffs.iter().enumerate() {
        let k = (i + 1) as f64;
        acc += k * (b * p - b.conj() * q);
        p *= w;
        q *= inv;
    }
    acc
}

/// Interior parametrization `P(w) = base(radius · w)` of a Jordan curve
/// `P(S¹)`: a scaled circle conjugacy (Herman hulls) or a scaled germ
/// linearizer (Siegel compacts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "base", rename_all = "snake_case")]
pub enum InnerMap {
    Circle {
        map: ConformalConjugacy,
        radius: f64,
    },
    Germ {
        map: GermLinearizer,
        radius: f64,
    },
}

impl InnerMap {
    pub fn radius(&self) -> f64 {
        match self {
            InnerMap::Circle { radius, .. } | InnerMap::Germ { radius, .. } => *radius,
        }
    }

    pub fn point(&self, w: Complex64) -> Result<Complex64> {
        match self {
            InnerMap::Circle { map, radius } => map.forward(w * *radius),
            InnerMap::Germ { map, radius } => Ok(map.eval(w * *radius)),
        }
    }

    pub fn deriv(&self, w: Complex64) -> Result<Complex64> {
        match self {
            InnerMap::Circle { map, radius } => Ok(map.deriv(w * *radius)? * *radius),
            InnerMap::Germ { map, radius } => Ok(map.deriv(w * *radius) * *radius),
        }
    }

    pub fn preimage(&self, z: Complex64) -> Result<Complex64> {
        match self {
            InnerMap::Circle { map, radius } => Ok(map.inverse(z)? / *radius),
            InnerMap::Germ { map, radius } => Ok(map.inverse(z)? / *radius),
        }
    }

    /// Largest `|w|` for which `P` stays inside the certified domain of its base.
    pub fn outer_limit(&self) -> f64 {
        match self {
            InnerMap::Circle { map, radius } => map.annulus().outer / radius,
            InnerMap::Germ { map, radius } => map.certified_radius() / radius,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(h: &ConformalConjugacy, r: f64) -> f64 {
        (0..64)
            .map(|j| {
                let w = Complex64::from_polar(r, 0.1 * j as f64);
                (h.inverse(h.forward(w).unwrap()).unwrap() - w).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn moebius_round_trip_and_circle() {
        let h = ConformalConjugacy::moebius(Complex64::new(0.3, 0.1)).unwrap();
        assert!(round_trip(&h, 1.0) < 1e-14);
        assert!(round_trip(&h, 1.5) < 1e-14);
        for j in 0..32 {
            let w = Complex64::cis(0.2 * j as f64);
            assert!((h.forward(w).unwrap().norm() - 1.0).abs() < 1e-15);
        }
        assert!(ConformalConjugacy::moebius(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn fourier_perturbation_is_schwarz_symmetric() {
        let h = ConformalConjugacy::fourier(vec![
            Complex64::new(0.05, 0.02),
            Complex64::new(0.0, 0.01),
        ])
        .unwrap();
        let ann = h.annulus();
        assert!(ann.outer > 1.3, "annulus {ann:?}");
        for j in 0..32 {
            let w = Complex64::from_polar(1.1, 0.2 * j as f64);
            let lhs = h.forward(w.conj().inv()).unwrap().conj();
            let rhs = h.forward(w).unwrap().inv();
            assert!((lhs - rhs).norm() < 1e-14);
            let on_circle = h.forward(Complex64::cis(0.2 * j as f64)).unwrap();
            assert!((on_circle.norm() - 1.0).abs() < 1e-15);
        }
        assert!(round_trip(&h, 1.0) < 1e-13);
        assert!(round_trip(&h, 1.2) < 1e-13);
    }

    #[test]
    fn fourier_deriv_matches_difference() {
        let h = ConformalConjugacy::fourier(vec![Complex64::new(0.04, -0.03)]).unwrap();
        let w = Complex64::new(0.9, 0.5);
        let e = 1e-6;
        let fd = (h.forward(w + e).unwrap() - h.forward(w - e).unwrap()) / (2.0 * e);
        assert!((fd - h.deriv(w).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn large_perturbation_rejected() {
        assert!(ConformalConjugacy::fourier(vec![Complex64::new(0.0, 2.0)]).is_err());
    }
}
