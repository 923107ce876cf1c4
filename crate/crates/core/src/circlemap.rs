//! Analytic circle diffeomorphisms stored by their Laurent coefficients on
//! the unit circle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conjugacy::{Annulus, ConformalConjugacy};
use crate::error::{Error, Result};
use crate::spectral::{self, Grid, Laurent};

pub const GOLDEN_MEAN: f64 = 0.618_033_988_749_894_8;
/// `√2 − 1`, continued fraction `[0; 2, 2, 2, ...]`.
pub const SILVER_MEAN: f64 = 0.414_213_562_373_095_1;
/// `(√13 − 3)/2`, continued fraction `[0; 3, 3, 3, ...]`.
pub const BRONZE_MEAN: f64 = 0.302_775_637_731_994_6;
/// `√3 − 1`, continued fraction `[0; 1, 2, 1, 2, ...]`.
pub const SQRT3_MINUS_ONE: f64 = 0.732_050_807_568_877_2;

/// Default evaluation tolerance for constructed maps.
pub const TOL_EVAL: f64 = 1e-10;
/// Coefficients below this modulus are dropped from the tails.
pub const COEFF_TRIM: f64 = 1e-14;

const CF_DEPTH: usize = 12;
const MAX_PARTIAL_QUOTIENT: f64 = 50.0;

/// Rejects rational (or numerically near-rational) rotation numbers and
/// anything whose leading continued-fraction digits are unbounded-looking.
pub fn check_admissible(alpha: f64) -> Result<()> {
    let reject = |reason: String| Err(Error::InadmissibleRotation { alpha, reason });
    if !(alpha > 0.0 && alpha < 1.0) {
        return reject("rotation number must lie in (0, 1)".into());
    }
    let mut x = alpha;
    for depth in 0..CF_DEPTH {
        if x < 1e-9 {
            return reject(format!("continued fraction terminates at depth {depth}"));
        }
        let y = 1.0 / x;
        let a = y.floor();
        if a > MAX_PARTIAL_QUOTIENT {
            return reject(format!(
                "partial quotient {a} at depth {depth} exceeds {MAX_PARTIAL_QUOTIENT}"
            ));
        }
        x = y - a;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Constructed,
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationNumber {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub iterations: usize,
}

/// Analytic circle diffeomorphism `g(z) = Σ c_k z^k` on a certified annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    grid: Grid,
    series: Laurent,
    annulus: Annulus,
    rotation: RotationNumber,
    linearizer: Option<ConformalConjugacy>,
}

impl CircleMap {
    /// Rigid rotation `z ↦ e^{2πiα} z`.
    pub fn rotation(alpha: f64, grid: Grid) -> Result<Self> {
        check_admissible(alpha)?;
        Ok(Self::rotation_unchecked(alpha, grid))
    }

    /// Rotation with no admissibility filter. Exists for trivial-case tests
    /// with rational α.
    pub fn rotation_unchecked(alpha: f64, grid: Grid) -> Self {
        CircleMap {
            grid,
            series: Laurent::monomial(1, Complex64::cis(TAU * alpha)),
            annulus: Annulus::symmetric(Annulus::MAX_RADIUS),
            rotation: RotationNumber {
                value: alpha.rem_euclid(1.0),
                provenance: Provenance::Constructed,
            },
            linearizer: Some(ConformalConjugacy::Identity),
        }
    }

    /// `g = h ∘ R_α ∘ h⁻¹`.
    pub fn linearizable(alpha: f64, h: ConformalConjugacy, grid: Grid) -> Result<Self> {
        check_admissible(alpha)?;
        Self::linearizable_unchecked(alpha, h, grid)
    }

    pub(crate) fn linearizable_unchecked(
        alpha: f64,
        h: ConformalConjugacy,
        grid: Grid,
    ) -> Result<Self> {
        if h.is_identity() {
            return Ok(Self::rotation_unchecked(alpha, grid));
        }
        let lambda = Complex64::cis(TAU * alpha);
        let pts = grid.points();
        let mut min_dh = f64::INFINITY;
        let mut samples = Vec::with_capacity(pts.len());
        for &xi in &pts {
            min_dh = min_dh.min(h.deriv(xi)?.norm());
            let w = h.inverse(xi)?;
            samples.push(h.forward(lambda * w)?);
        }
        if !(min_dh > 1e-8) {
            return Err(Error::NotUnivalent(format!(
                "conjugacy derivative vanishes on the circle (min |h'| = {min_dh:e})"
            )));
        }
        let mut g = Self::from_samples(&samples, grid, alpha, Provenance::Constructed)?;
        g.annulus = g.annulus.intersect(&h.annulus());
        g.linearizer = Some(h);
        Ok(g)
    }

    /// Fits coefficients to circle samples and certifies an annulus from
    /// their decay.
    pub fn from_samples(
        samples: &[Complex64],
        grid: Grid,
        alpha: f64,
        provenance: Provenance,
    ) -> Result<Self> {
        if samples.len() != grid.size() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.size(),
                samples.len()
            )));
        }
        let series = Laurent::from_samples(samples, grid.n, COEFF_TRIM);
        let annulus = certify(&series, TOL_EVAL);
        Ok(CircleMap {
            grid,
            series,
            annulus,
            rotation: RotationNumber {
                value: alpha.rem_euclid(1.0),
                provenance,
            },
            linearizer: None,
        })
    }

    /// Rebuilds a map from serialized parts.
    pub fn from_parts(
        grid: Grid,
        series: Laurent,
        annulus: Annulus,
        rotation: RotationNumber,
        linearizer: Option<ConformalConjugacy>,
    ) -> Self {
        CircleMap {
            grid,
            series,
            annulus,
            rotation,
            linearizer,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn series(&self) -> &Laurent {
        &self.series
    }

    pub fn annulus(&self) -> Annulus {
        self.annulus
    }

    pub fn rotation_number(&self) -> RotationNumber {
        self.rotation
    }

    pub fn alpha(&self) -> f64 {
        self.rotation.value
    }

    pub fn linearizer(&self) -> Option<&ConformalConjugacy> {
        self.linearizer.as_ref()
    }

    pub fn with_linearizer(mut self, h: ConformalConjugacy) -> Self {
        self.linearizer = Some(h);
        self
    }

    pub fn with_rotation(mut self, rotation: RotationNumber) -> Self {
        self.rotation = rotation;
        self
    }

    /// Newton iteration for a circle linearizer. Finds a mean-free `v` and a
    /// rotation number `β` with `G(θ + v(θ)) = θ + 2πβ + v(θ + 2πβ)`, where
    /// `G` lifts `g`. Warm-started from `guess` (`v̂_k`, `k ≥ 1`) and `beta`.
    ///
    /// Each correction solves `w(θ + 2πβ) − w(θ) + δβ = E/H'(θ + 2πβ)`
    /// diagonally in Fourier space, so convergence is quadratic for
    /// Diophantine `β` and the cost is a few FFTs per iteration.
    pub fn newton_linearizer(
        &self,
        guess: &[Complex64],
        beta: f64,
    ) -> Result<(ConformalConjugacy, f64)> {
        const MAX_NEWTON: usize = 30;
        const TOL_CONJ: f64 = 1e-13;
        let m = self.grid.size();
        let half = m / 2 - 1;
        let theta = self.grid.angles();
        let mut c = vec![Complex64::new(0.0, 0.0); m];
        for (i, b) in guess.iter().take(half).enumerate() {
            c[i + 1] = *b;
            c[m - i - 1] = b.conj();
        }
        let sampled = |c: &[Complex64], mult: &dyn Fn(i64) -> Complex64| -> Vec<f64> {
            let d: Vec<Complex64> = c
                .iter()
                .enumerate()
                .map(|(i, ci)| ci * mult(spectral::frequency(i, m)))
                .collect();
            spectral::inverse(&d).into_iter().map(|z| z.re).collect()
        };
        let mut shift = TAU * beta;
        let mut history = Vec::new();
        for _ in 0..MAX_NEWTON {
            let rot = |k: i64| Complex64::cis(k as f64 * shift);
            let v = sampled(&c, &|_| Complex64::new(1.0, 0.0));
            let dv = sampled(&c, &|k| Complex64::new(0.0, k as f64));
            let va = sampled(&c, &rot);
            let dva = sampled(&c, &|k| Complex64::new(0.0, k as f64) * rot(k));
            let e: Vec<f64> = (0..m)
                .map(|j| {
                    let gz = self.series.eval(Complex64::cis(theta[j] + v[j]));
                    (gz * Complex64::cis(-(theta[j] + shift + va[j]))).arg()
                })
                .collect();
            let err = e.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let stalled = history.last().is_some_and(|&p: &f64| err >= 0.5 * p);
            history.push(err);
            if err <= TOL_CONJ || (stalled && err <= 100.0 * TOL_CONJ) {
                let coeffs = (1..=half).map(|k| c[k]).collect::<Vec<_>>();
                let mut coeffs = coeffs;
                while coeffs.last().is_some_and(|b| b.norm() < 1e-15) {
                    coeffs.pop();
                }
                let h = ConformalConjugacy::fourier(coeffs)?;
                return Ok((h, (shift / TAU).rem_euclid(1.0)));
            }
            if !err.is_finite() || (stalled && history.len() > 3) {
                break;
            }
            let r: Vec<f64> = e.iter().zip(&dva).map(|(ej, d)| ej / (1.0 + d)).collect();
            let rc = spectral::forward_real(&r);
            let mut wc = vec![Complex64::new(0.0, 0.0); m];
            for k in 1..=half {
                let divisor = rot(k as i64) - 1.0;
                if divisor.norm() < 1e-12 {
                    return Err(Error::SmallDivisor {
                        k: k as i64,
                        divisor: divisor.norm(),
                        floor: 1e-12,
                    });
                }
                // rounding-level modes would only be amplified by the divisor
                if rc[k].norm() > 1e-16 {
                    wc[k] = rc[k] / divisor;
                    wc[m - k] = wc[k].conj();
                }
            }
            let w: Vec<f64> = spectral::inverse(&wc).into_iter().map(|z| z.re).collect();
            let mut next: Vec<f64> = (0..m).map(|j| v[j] + (1.0 + dv[j]) * w[j]).collect();
            // the free constant in w precomposes h with a rotation; spend it
            // on keeping v mean-free
            let mean = next.iter().sum::<f64>() / m as f64;
            next.iter_mut().zip(&dv).for_each(|(x, d)| *x -= mean * (1.0 + d));
            shift += rc[0].re;
            c = spectral::forward_real(&next);
            c[0] = Complex64::new(0.0, 0.0);
            c[m / 2] = Complex64::new(0.0, 0.0);
        }
        Err(Error::NonConvergence {
            what: "Newton linearizer",
            detail: format!("conjugacy residual history {history:.3?}"),
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        Ok(self.series.eval(z))
    }

    pub fn deriv(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        Ok(self.series.deriv(z))
    }

    fn check(&self, z: Complex64) -> Result<()> {
        if self.annulus.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideAnnulus {
                z,
                rho_in: self.annulus.inner,
                rho_out: self.annulus.outer,
            })
        }
    }

    /// Value on the unit circle (always inside the certified annulus).
    pub fn on_circle(&self, z: Complex64) -> Complex64 {
        self.series.eval(z)
    }

    pub fn deriv_on_circle(&self, z: Complex64) -> Complex64 {
        self.series.deriv(z)
    }

    /// Evaluation through the linearizer when one is attached, which stays
    /// exact beyond the coefficient-certified annulus.
    pub fn eval_exact(&self, z: Complex64) -> Result<Complex64> {
        match &self.linearizer {
            Some(h) => {
                let lambda = Complex64::cis(TAU * self.rotation.value);
                h.forward(lambda * h.inverse(z)?)
            }
            None => self.eval(z),
        }
    }

    pub fn samples(&self) -> Vec<Complex64> {
        self.series.to_samples(self.grid.size())
    }

    /// `max_j ||g(ξ_j)| − 1|` on the grid and on the staggered midpoints.
    pub fn circle_residual(&self) -> f64 {
        let m = self.grid.size();
        (0..2 * m)
            .map(|j| {
                let z = Complex64::cis(PI * j as f64 / m as f64);
                (self.on_circle(z).norm() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max |conj(g(1/conj z)) − 1/g(z)|` on the circle `|z| = rho`.
    pub fn schwarz_residual(&self, rho: f64) -> Result<f64> {
        let m = self.grid.size();
        let mut worst: f64 = 0.0;
        for j in 0..m {
            let z = Complex64::from_polar(rho, TAU * j as f64 / m as f64);
            let lhs = self.eval(z.conj().inv())?.conj();
            let rhs = self.eval(z)?.inv();
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(worst)
    }

    pub fn min_abs_derivative(&self) -> f64 {
        self.grid
            .points()
            .iter()
            .map(|&z| self.deriv_on_circle(z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Lift of the angle displacement `arg g(e^{iθ}) − θ` on the grid,
    /// unwrapped and with the branch at θ = 0 taken in [0, 2π).
    pub fn displacement(&self) -> Vec<f64> {
        let pts = self.grid.points();
        let mut d: Vec<f64> = pts
            .iter()
            .map(|&z| (self.on_circle(z) * z.conj()).arg())
            .collect();
        spectral::unwrap(&mut d);
        let shift = TAU * (d[0] / TAU).floor();
        d.iter_mut().for_each(|x| *x -= shift);
        d
    }

    /// Lifted angle `G(θ)` with `G(θ + 2π) = G(θ) + 2π`, consistent with
    /// [`displacement`](Self::displacement) on the grid.
    pub fn lift(&self) -> Lift<'_> {
        Lift::new(self)
    }

    /// Angles `θ` with `g(e^{iθ}) = e^{i target}` (Newton on the lift).
    pub fn preimage_angles(&self, targets: &[f64]) -> Vec<f64> {
        let lift = self.lift();
        targets.iter().map(|&t| lift.invert(t)).collect()
    }

    /// Inverse map: closed form through the linearizer when available,
    /// otherwise Newton inversion of the circle samples.
    pub fn inverse(&self) -> Result<CircleMap> {
        let alpha = (1.0 - self.rotation.value).rem_euclid(1.0);
        if let Some(h) = &self.linearizer {
            return Self::linearizable_unchecked(alpha, h.clone(), self.grid);
        }
        let angles = self.preimage_angles(&self.grid.angles());
        let samples: Vec<Complex64> = angles.into_iter().map(Complex64::cis).collect();
        Self::from_samples(&samples, self.grid, alpha, self.rotation.provenance)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &CircleMap) -> Result<CircleMap> {
        if self.grid != inner.grid {
            return Err(Error::InvalidArgument("composition of maps on different grids".into()));
        }
        // largest radius whose image under `inner` stays in our annulus
        let mut rho = inner.annulus.outer.min(self.annulus.outer);
        let fits = |r: f64| -> bool {
            (0..256).all(|j| {
                let z = Complex64::from_polar(r, TAU * j as f64 / 256.0);
                let w = inner.series.eval(z);
                let wi = inner.series.eval(z.conj().inv());
                self.annulus.contains(w) && self.annulus.contains(wi)
            })
        };
        while rho > 1.0 + 1e-9 && !fits(rho) {
            rho = 1.0 + (rho - 1.0) * 0.8;
        }
        if rho <= 1.0 + 1e-9 {
            let img: Vec<f64> = (0..256)
                .map(|j| inner.series.eval(Complex64::from_polar(inner.annulus.outer, TAU * j as f64 / 256.0)).norm())
                .collect();
            return Err(Error::AnnulusMismatch {
                img_in: img.iter().cloned().fold(f64::INFINITY, f64::min),
                img_out: img.iter().cloned().fold(0.0, f64::max),
                rho_in: self.annulus.inner,
                rho_out: self.annulus.outer,
            });
        }
        let samples: Vec<Complex64> = inner
            .samples()
            .into_iter()
            .map(|w| self.series.eval(w))
            .collect();
        let both_constructed = self.rotation.provenance == Provenance::Constructed
            && inner.rotation.provenance == Provenance::Constructed;
        let shared = match (&self.linearizer, &inner.linearizer) {
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            _ => None,
        };
        let (alpha, prov) = if both_constructed && shared.is_some() {
            (
                (self.rotation.value + inner.rotation.value).rem_euclid(1.0),
                Provenance::Constructed,
            )
        } else {
            (0.0, Provenance::Estimated)
        };
        let mut g = Self::from_samples(&samples, self.grid, alpha, prov)?;
        g.annulus = g.annulus.intersect(&Annulus::symmetric(rho));
        g.linearizer = shared;
        if prov == Provenance::Estimated {
            g.rotation.value = g.estimate_rotation_number(10_000).value;
        }
        Ok(g)
    }

    /// Birkhoff average of lift displacements along the orbit of 1.
    /// `|F^n(x) − x − nρ| < 1` gives the error bound `1/n`.
    pub fn estimate_rotation_number(&self, n_iter: usize) -> RotationEstimate {
        let lift = self.lift();
        let mut x = 0.0;
        for _ in 0..n_iter {
            x = lift.eval(x);
        }
        RotationEstimate {
            value: (x / TAU / n_iter as f64).rem_euclid(1.0),
            error_bound: 1.0 / n_iter as f64,
            iterations: n_iter,
        }
    }

    /// Max distance between two maps on the circle grid.
    pub fn sup_distance(&self, other: &CircleMap) -> f64 {
        self.grid
            .points()
            .iter()
            .map(|&z| (self.on_circle(z) - other.on_circle(z)).norm())
            .fold(0.0, f64::max)
    }
}

/// Annulus on which the truncated series is accurate to `tol`: the truncated
/// tail (coefficients at the trim level) amplified by `ρ^K` must stay below
/// `tol`, and ρ stays halfway inside the fitted convergence radius.
pub(crate) fn certify(series: &Laurent, tol: f64) -> Annulus {
    let k = series.half().max(1) as f64;
    let (q_pos, q_neg) = series.tail_decay(COEFF_TRIM * 0.1);
    let trunc_limit = (tol / COEFF_TRIM).powf(1.0 / k);
    let out_conv = q_pos.map_or(f64::INFINITY, |q| (1.0 + 1.0 / q) / 2.0);
    let in_conv = q_neg.map_or(0.0, |q| (1.0 + q) / 2.0);
    let outer = trunc_limit.min(out_conv).min(1.0 / in_conv.max(1.0 / trunc_limit));
    Annulus::symmetric(outer.max(1.0))
}

/// Continuous lift `G` of a circle map, `g(e^{iθ}) = e^{iG(θ)}`.
pub struct Lift<'a> {
    map: &'a CircleMap,
    disp: Vec<f64>,
}

impl<'a> Lift<'a> {
    fn new(map: &'a CircleMap) -> Self {
        Lift {
            map,
            disp: map.displacement(),
        }
    }

    /// Linear interpolation of the grid displacement (branch reference).
    fn reference(&self, theta: f64) -> f64 {
        let m = self.disp.len();
        let t = spectral::wrap(theta);
        let x = t / TAU * m as f64;
        let i = (x.floor() as usize).min(m - 1);
        let f = x - i as f64;
        let a = self.disp[i];
        let b = if i + 1 < m { self.disp[i + 1] } else { self.disp[0] };
        a + f * (b - a)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let z = Complex64::cis(theta);
        let p = (self.map.on_circle(z) * z.conj()).arg();
        let r = self.reference(theta);
        theta + p + TAU * ((r - p) / TAU).round()
    }

    /// `dG/dθ = |g'(e^{iθ})|`.
    pub fn slope(&self, theta: f64) -> f64 {
        let z = Complex64::cis(theta);
        (z * self.map.deriv_on_circle(z) / self.map.on_circle(z)).re
    }

    /// Solves `G(θ) ≡ target (mod 2π)`.
    pub fn invert(&self, target: f64) -> f64 {
        // bracket on the grid, then Newton
        let m = self.disp.len();
        let base = self.disp[0];
        let t = spectral::wrap(target - base) + base;
        let grid_lift = |j: usize| TAU * j as f64 / m as f64 + self.disp[j];
        let mut lo = 0;
        let mut hi = m;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if grid_lift(mid) <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = grid_lift(lo);
        let b = if lo + 1 < m { grid_lift(lo + 1) } else { TAU + grid_lift(0) };
        let mut theta = TAU * (lo as f64 + (t - a) / (b - a)) / m as f64;
        for _ in 0..30 {
            let step = (self.eval(theta) - t) / self.slope(theta);
            theta -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(128)
    }

    #[test]
    fn newton_linearizer_recovers_moebius_conjugacy() {
        let a = Complex64::new(0.15, 0.05);
        let h = ConformalConjugacy::moebius(a).unwrap();
        let g = CircleMap::linearizable(GOLDEN_MEAN, h, grid()).unwrap();
        // cold start from the identity with a perturbed rotation number
        let (lin, beta) = g.newton_linearizer(&[], GOLDEN_MEAN + 1e-4).unwrap();
        assert!((beta - GOLDEN_MEAN).abs() < 1e-13, "beta = {beta}");
        let lambda = Complex64::cis(TAU * beta);
        for xi in grid().points() {
            let w = lin.inverse(xi).unwrap();
            assert!((lin.forward(lambda * w).unwrap() - g.on_circle(xi)).norm() < 1e-12);
        }
    }

    #[test]
    fn quarter_rotation_maps_one_to_i() {
        let g = CircleMap::rotation_unchecked(0.25, grid());
        let v = g.eval(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn rational_rotation_rejected() {
        assert!(CircleMap::rotation(0.25, grid()).is_err());
        assert!(CircleMap::rotation(0.3, grid()).is_err());
        assert!(CircleMap::rotation(1.5, grid()).is_err());
        for a in [GOLDEN_MEAN, SILVER_MEAN, BRONZE_MEAN, SQRT3_MINUS_ONE] {
            assert!(CircleMap::rotation(a, grid()).is_ok(), "{a}");
        }
    }

    #[test]
    fn golden_rotation_derivative_is_multiplier() {
        let g = CircleMap::rotation(GOLDEN_MEAN, grid()).unwrap();
        let lam = Complex64::cis(TAU * GOLDEN_MEAN);
        for z in grid().points().into_iter().step_by(17) {
            assert!((g.deriv(z).unwrap() - lam).norm() < 1e-15);
        }
    }

    #[test]
    fn out_of_annulus_is_error() {
        let h = ConformalConjugacy::moebius(Complex64::new(0.3, 0.0)).unwrap();
        let g = CircleMap::linearizable(GOLDEN_MEAN, h, grid()).unwrap();
        let far = Complex64::new(g.annulus().outer * 1.5, 0.0);
        assert!(matches!(g.eval(far), Err(Error::OutsideAnnulus { .. })));
    }

    #[test]
    fn rotation_numbers_add_under_composition() {
        let a = CircleMap::rotation(GOLDEN_MEAN, grid()).unwrap();
        let b = CircleMap::rotation(SILVER_MEAN, grid()).unwrap();
        let c = a.compose(&b).unwrap();
        let expect = (GOLDEN_MEAN + SILVER_MEAN).rem_euclid(1.0);
        assert_eq!(c.rotation_number().provenance, Provenance::Constructed);
        assert!((c.alpha() - expect).abs() < 1e-15);
        let r = CircleMap::rotation_unchecked(expect, grid());
        assert!(c.sup_distance(&r) < 1e-14);
    }

    #[test]
    fn rotation_estimate_of_rigid_rotation() {
        let g = CircleMap::rotation(GOLDEN_MEAN, grid()).unwrap();
        let est = g.estimate_rotation_number(1000);
        assert!((est.value - GOLDEN_MEAN).abs() < 1e-12);
    }

    #[test]
    fn lift_inversion() {
        let h = ConformalConjugacy::moebius(Complex64::new(0.2, -0.3)).unwrap();
        let g = CircleMap::linearizable(SILVER_MEAN, h, grid()).unwrap();
        let lift = g.lift();
        for t in [0.0, 1.0, 3.0, 6.2] {
            let th = lift.invert(t);
            let back = lift.eval(th);
            assert!((Complex64::cis(back) - Complex64::cis(t)).norm() < 1e-13);
        }
    }
}
