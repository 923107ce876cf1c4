//! Hulls, exterior Riemann maps and logarithmic capacity.
//!
//! The exterior map of a hull star-shaped about the origin is computed by
//! Theodorsen's iteration on the polar boundary description `r = ρ(ϑ)`:
//! the boundary correspondence `ϑ(σ)` solves `ϑ = σ − K[log ρ∘ϑ]`, with `K`
//! the conjugate-function operator, and then `log(φ(z)/z)` is the exterior
//! holomorphic function with real boundary part `log ρ∘ϑ`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circlemap::CircleMap;
use crate::conjugacy::{ConformalConjugacy, InnerMap, Welded};
use crate::error::{Error, Result};
use crate::germ::GermLinearizer;
use crate::spectral::{self, Grid, Laurent, PeriodicSeries};

pub const MAX_ITER: usize = 200;
pub const TOL_MAP: f64 = 1e-9;

/// Update size below which the boundary-correspondence iteration stops.
const TOL_FIXED_POINT: f64 = 1e-14;

/// Closed curve `γ(s)`, `s ∈ [0, 2π)`, stored as a Laurent series so that it
/// can be resampled at arbitrary parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanCurve {
    grid: Grid,
    series: Laurent,
}

impl JordanCurve {
    /// Samples `γ(s_j)` on the grid. The curve must wind once around the
    /// origin and be star-shaped about it (strictly increasing argument).
    pub fn from_samples(grid: Grid, samples: &[Complex64]) -> Result<Self> {
        if samples.len() != grid.size() {
            return Err(Error::InvalidCurve(format!(
                "expected {} samples, got {}",
                grid.size(),
                samples.len()
            )));
        }
        let curve = JordanCurve {
            grid,
            series: Laurent::from_samples(samples, grid.n, 1e-16),
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Result<Complex64>) -> Result<Self> {
        let samples = grid.angles().into_iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::from_samples(grid, &samples)
    }

    pub fn circle(radius: f64, grid: Grid) -> Result<Self> {
        Self::from_fn(grid, |s| Ok(Complex64::from_polar(radius, s)))
    }

    /// Ellipse with semi-axes `a` (real) and `b` (imaginary).
    pub fn ellipse(a: f64, b: f64, grid: Grid) -> Result<Self> {
        Self::from_fn(grid, |s| Ok(Complex64::new(a * s.cos(), b * s.sin())))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn point(&self, s: f64) -> Complex64 {
        self.series.eval_angle(s)
    }

    pub fn samples(&self) -> Vec<Complex64> {
        self.series.to_samples(self.grid.size())
    }

    /// Image under `z ↦ c z`.
    pub fn scaled(&self, c: Complex64) -> JordanCurve {
        JordanCurve {
            grid: self.grid,
            series: self.series.scale(c),
        }
    }

    /// `d arg γ / ds = Im(γ'/γ)`.
    fn angular_speed(&self, s: f64) -> f64 {
        (self.series.dtheta(s) / self.point(s)).im
    }

    fn validate(&self) -> Result<()> {
        let m = 4 * self.grid.size();
        let mut slowest = f64::INFINITY;
        for j in 0..m {
            let s = TAU * j as f64 / m as f64;
            if self.point(s).norm() < 1e-12 {
                return Err(Error::InvalidCurve("curve passes through the origin".into()));
            }
            slowest = slowest.min(self.angular_speed(s));
        }
        if slowest <= 0.0 {
            return Err(Error::InvalidCurve(
                "curve is not star-shaped about the origin (argument not increasing)".into(),
            ));
        }
        Ok(())
    }

    /// `log ρ(ϑ_j)` on the uniform angle grid, where `r = ρ(ϑ)` is the polar
    /// equation of the curve. The parameter solving `arg γ(s) = ϑ` is found
    /// by Newton's method, warm-started from the previous angle.
    pub fn polar_log_radius(&self) -> Result<Vec<f64>> {
        let m = self.grid.size();
        let a0 = self.point(0.0).arg();
        let mut s = 0.0;
        let mut out = Vec::with_capacity(m);
        for j in 0..m {
            // the warm start keeps the argument within half a turn of target
            let target = a0 + TAU * j as f64 / m as f64;
            let rot = Complex64::cis(-target);
            let mut f = 0.0;
            for _ in 0..60 {
                f = (rot * self.point(s)).arg();
                let step = f / self.angular_speed(s);
                s -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            if f.abs() > 1e-12 {
                return Err(Error::NonConvergence {
                    what: "polar inversion of curve",
                    detail: format!("angle {target}, residual {f:e}"),
                });
            }
            out.push(self.point(s).norm().ln());
        }
        // out[j] is log ρ at a0 + θ_j; rotate to ρ at θ_j
        let series = PeriodicSeries::from_samples(&out, 0.0);
        Ok((0..m)
            .map(|j| series.eval(TAU * j as f64 / m as f64 - a0))
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOptions {
    pub max_iter: usize,
    pub tol_map: f64,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions {
            max_iter: MAX_ITER,
            tol_map: TOL_MAP,
        }
    }
}

/// Normalized exterior map `φ(z) = z exp(F(z))`, `F(z) = Σ_{k≥0} a_k z^{-k}`,
/// from `{|z| > 1}` onto the complement of a hull; `a_0 = capacity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorMap {
    capacity: f64,
    coeffs: Vec<Complex64>,
    residual: f64,
    iterations: usize,
}

impl ExteriorMap {
    /// `φ(z) = e^t z`, the exterior map of the disk of radius `e^t`.
    pub fn dilation(t: f64) -> Self {
        ExteriorMap {
            capacity: t,
            coeffs: vec![Complex64::new(t, 0.0)],
            residual: 0.0,
            iterations: 0,
        }
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Self-reported boundary residual: distance from `φ(e^{iσ_j})` to the
    /// target curve along the ray through it.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn log_ratio(&self, z: Complex64) -> Complex64 {
        let w = z.inv();
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * w + a)
    }

    /// `z F'(z) = −Σ k a_k z^{-k}`.
    fn log_ratio_euler(&self, z: Complex64) -> Complex64 {
        let w = z.inv();
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, a)| acc * w - a * k as f64)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() < 1.0 - 1e-12 {
            return Err(Error::NotExterior(z));
        }
        Ok(self.eval_unchecked(z))
    }

    pub fn deriv(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() < 1.0 - 1e-12 {
            return Err(Error::NotExterior(z));
        }
        Ok(self.deriv_unchecked(z))
    }

    /// The series continues slightly inside the unit disk; callers that stay
    /// on or near the circle use this directly.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        z * self.log_ratio(z).exp()
    }

    pub fn deriv_unchecked(&self, z: Complex64) -> Complex64 {
        self.log_ratio(z).exp() * (1.0 + self.log_ratio_euler(z))
    }

    /// `ψ = φ⁻¹` by Newton's method seeded from the boundary correspondence.
    /// Fails with [`Error::NotExterior`] for points of the hull.
    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        let arg = w.arg();
        let sigma = arg - self.log_ratio(Complex64::cis(arg)).im;
        let edge = self.eval_unchecked(Complex64::cis(sigma)).norm();
        let mut z = Complex64::from_polar((w.norm() / edge).max(1.0), sigma);
        let mut res = (self.eval_unchecked(z) - w).norm();
        for _ in 0..100 {
            let step = (self.eval_unchecked(z) - w) / self.deriv_unchecked(z);
            let mut lambda = 1.0;
            let mut next = z - step;
            let mut next_res = (self.eval_unchecked(next) - w).norm();
            while !(next_res <= res) && lambda > 1e-3 {
                lambda *= 0.5;
                next = z - step * lambda;
                next_res = (self.eval_unchecked(next) - w).norm();
            }
            z = next;
            res = next_res;
            if step.norm() * lambda <= 1e-16 * z.norm() || res == 0.0 {
                break;
            }
        }
        if !res.is_finite() || (res > 1e-11 * (1.0 + w.norm()) && z.norm() < 1.0) {
            // the iteration was pulled into the disk, where the series diverges
            return Err(Error::NotExterior(w));
        }
        if res > 1e-11 * (1.0 + w.norm()) {
            return Err(Error::NonConvergence {
                what: "exterior map inversion",
                detail: format!("w = {w}, residual {res:e}"),
            });
        }
        if z.norm() < 1.0 - 1e-9 {
            return Err(Error::NotExterior(w));
        }
        Ok(z)
    }

    /// Pairs `(σ_j, φ(e^{iσ_j}))` on the grid.
    pub fn boundary_correspondence(&self, grid: Grid) -> Vec<(f64, Complex64)> {
        grid.angles()
            .into_iter()
            .map(|s| (s, self.eval_unchecked(Complex64::cis(s))))
            .collect()
    }
}

/// Exterior Riemann map of the hull bounded by `curve`.
///
/// The boundary-correspondence iteration contracts when the polar log-radius
/// has slope below one (ellipses up to aspect ratio about 2.4); beyond that
/// it reports [`Error::MapNonConvergence`].
pub fn exterior_map(curve: &JordanCurve, opts: MapOptions) -> Result<ExteriorMap> {
    let grid = curve.grid();
    let m = grid.size();
    let log_rho = PeriodicSeries::from_samples(&curve.polar_log_radius()?, 1e-17);
    let sigma = grid.angles();
    let mut theta = sigma.clone();
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut u: Vec<f64> = theta.iter().map(|&t| log_rho.eval(t)).collect();
    loop {
        let k = spectral::conjugate_function(&u);
        let mut delta: f64 = 0.0;
        for j in 0..m {
            let next = sigma[j] - k[j];
            delta = delta.max((next - theta[j]).abs());
            theta[j] = next;
        }
        iterations += 1;
        history.push(delta);
        u = theta.iter().map(|&t| log_rho.eval(t)).collect();
        if delta <= TOL_FIXED_POINT {
            break;
        }
        // stagnation at rounding level
        let n = history.len();
        if n > 8 && delta <= opts.tol_map * 1e-3 && history[n - 8] <= delta * 1.5 {
            break;
        }
        if iterations >= opts.max_iter {
            if delta > opts.tol_map {
                return Err(Error::MapNonConvergence {
                    iterations,
                    residual: delta,
                    history,
                });
            }
            break;
        }
    }
    if let Some(j) = (0..m).find(|&j| {
        let next = if j + 1 < m { theta[j + 1] } else { theta[0] + TAU };
        next <= theta[j]
    }) {
        return Err(Error::NotUnivalent(format!(
            "boundary correspondence not monotone at sample {j}"
        )));
    }

    let uh = spectral::forward_real(&u);
    let half = m / 2 - 1;
    let mut coeffs: Vec<Complex64> = (0..=half)
        .map(|k| if k == 0 { uh[0] } else { 2.0 * uh[m - k] })
        .collect();
    coeffs[0].im = 0.0;
    while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm() < 1e-16) {
        coeffs.pop();
    }
    let mut map = ExteriorMap {
        capacity: coeffs[0].re,
        coeffs,
        residual: 0.0,
        iterations,
    };
    map.residual = grid
        .points()
        .into_iter()
        .map(|z| {
            let w = map.eval_unchecked(z);
            (w.norm() - log_rho.eval(w.arg()).exp()).abs()
        })
        .fold(0.0, f64::max);
    if map.residual > opts.tol_map {
        return Err(Error::MapNonConvergence {
            iterations,
            residual: map.residual,
            history,
        });
    }
    Ok(map)
}

/// Logarithmic capacity of the hull bounded by `curve`.
pub fn capacity(curve: &JordanCurve) -> Result<f64> {
    Ok(exterior_map(curve, MapOptions::default())?.capacity)
}

/// Invariant curve `h({|w| = r})`, `r > 1`, of a linearizable circle map;
/// it bounds the hull `D̄ ∪ A` with `A` the invariant Herman annulus.
pub fn hull_from_invariant_curve(g: &CircleMap, r: f64) -> Result<JordanCurve> {
    let h = g.linearizer().ok_or(Error::MissingLinearizer)?;
    hull_from_conjugacy(h, r, g.grid())
}

pub fn hull_from_conjugacy(h: &ConformalConjugacy, r: f64, grid: Grid) -> Result<JordanCurve> {
    let limit = h.annulus().outer;
    if !(r > 1.0) || r >= limit {
        return Err(Error::OutsideAnnulus {
            z: Complex64::new(r, 0.0),
            rho_in: 1.0,
            rho_out: limit,
        });
    }
    JordanCurve::from_fn(grid, |s| h.forward(Complex64::from_polar(r, s)))
}

/// Level curve `H({|w| = ρ})` of a germ linearizer; it bounds the compact
/// `K = H({|w| <= ρ})`.
pub fn hull_from_germ(h: &GermLinearizer, rho: f64, grid: Grid) -> Result<JordanCurve> {
    let limit = h.certified_radius();
    if !(rho > 0.0) || rho >= limit {
        return Err(Error::OutsideAnnulus {
            z: Complex64::new(rho, 0.0),
            rho_in: 0.0,
            rho_out: limit,
        });
    }
    JordanCurve::from_fn(grid, |s| Ok(h.eval(Complex64::from_polar(rho, s))))
}

/// Welding homeomorphism `w = P⁻¹ ∘ φ` on the circle and its inverse
/// `k = ψ ∘ P`, where `P` is the interior parametrization of the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Welding {
    pub grid: Grid,
    /// `w(ξ_j)`.
    pub forward: Vec<Complex64>,
    /// `k(ξ_j)`.
    pub inverse: Vec<Complex64>,
    /// `k` as an analytic circle conjugacy.
    pub conjugacy: ConformalConjugacy,
}

impl Welding {
    /// `max_j |k(w(ξ_j)) − ξ_j|`.
    pub fn round_trip_error(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (xi, w) in self.grid.points().into_iter().zip(&self.forward) {
            worst = worst.max((self.conjugacy.forward(*w)? - xi).norm());
        }
        Ok(worst)
    }
}

pub fn welding(exterior: &ExteriorMap, inner: &InnerMap, grid: Grid) -> Result<Welding> {
    let pts = grid.points();
    let forward = pts
        .iter()
        .map(|&z| inner.preimage(exterior.eval_unchecked(z)))
        .collect::<Result<Vec<_>>>()?;
    let conjugacy = ConformalConjugacy::Welded(Box::new(Welded {
        exterior: exterior.clone(),
        inner: inner.clone(),
    }));
    let inverse = pts
        .iter()
        .map(|&z| conjugacy.forward(z))
        .collect::<Result<Vec<_>>>()?;
    check_monotone(&forward)?;
    check_monotone(&inverse)?;
    Ok(Welding {
        grid,
        forward,
        inverse,
        conjugacy,
    })
}

/// Circle samples must advance by less than half a turn and positively.
fn check_monotone(samples: &[Complex64]) -> Result<()> {
    let m = samples.len();
    for j in 0..m {
        let d = (samples[(j + 1) % m] / samples[j]).arg();
        if d <= 0.0 {
            return Err(Error::NonMonotoneWelding { index: j });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(256)
    }

    #[test]
    fn circle_capacity_is_log_radius() {
        let c = JordanCurve::circle(1.7, grid()).unwrap();
        let map = exterior_map(&c, MapOptions::default()).unwrap();
        assert!((map.capacity() - 1.7f64.ln()).abs() < 1e-13);
        let z = Complex64::new(1.3, 2.0);
        assert!((map.eval(z).unwrap() - 1.7 * z).norm() < 1e-12);
    }

    #[test]
    fn ellipse_matches_joukowski() {
        let c = JordanCurve::ellipse(2.0, 1.0, grid()).unwrap();
        let map = exterior_map(&c, MapOptions::default()).unwrap();
        assert!((map.capacity() - 1.5f64.ln()).abs() < 1e-12);
        for j in 0..16 {
            let z = Complex64::from_polar(1.0 + 0.1 * j as f64, 0.7 * j as f64);
            let exact = 1.5 * z + 0.5 / z;
            assert!((map.eval(z).unwrap() - exact).norm() < 1e-11);
        }
    }

    #[test]
    fn inverse_round_trips_and_rejects_hull() {
        let c = JordanCurve::ellipse(2.0, 1.0, grid()).unwrap();
        let map = exterior_map(&c, MapOptions::default()).unwrap();
        for j in 0..16 {
            let z = Complex64::from_polar(1.0 + 0.2 * j as f64, 0.4 * j as f64);
            let w = map.eval(z).unwrap();
            assert!((map.inverse(w).unwrap() - z).norm() < 1e-12);
        }
        assert!(map.inverse(Complex64::new(0.5, 0.2)).is_err());
    }

    #[test]
    fn non_star_shaped_curve_rejected() {
        // a curve that winds around a point away from the origin
        let c = JordanCurve::from_fn(grid(), |s| Ok(Complex64::new(3.0 + s.cos(), s.sin())));
        assert!(matches!(c, Err(Error::InvalidCurve(_))));
    }
}
