//! The semigroup `Φ_t`, its generator `X`, flow integration and the
//! extraction of Loewner driving measures.
//!
//! `Φ_t(g) = ψ_t ∘ g ∘ φ_t` where `φ_t` is the exterior map of the invariant
//! hull of capacity `t`. The generator is `X(g) = g'χ − χ∘g` with
//! `χ(z) = z H(z)`, `H` the Herglotz transform of the reflected 2-conformal
//! measure of `g`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circlemap::{CircleMap, Provenance, RotationNumber, TOL_EVAL};
use crate::confmap::{self, exterior_map, ExteriorMap, MapOptions};
use crate::conjugacy::{Annulus, ConformalConjugacy, InnerMap, Welded};
use crate::error::{Error, Result};
use crate::germ::Germ;
use crate::herglotz::HerglotzField;
use crate::measures::{self, CircleMeasure, SolveOptions};
use crate::spectral::{self, Grid, Laurent};

/// Fraction of a certified radius the hull family may use.
const FAMILY_MARGIN: f64 = 0.98;
/// Target accuracy of the capacity reparametrization.
const CAPACITY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Achieved capacity of the hull (equals `t` for exact states).
    pub capacity: Option<f64>,
    pub capacity_error: Option<f64>,
    /// Scale parameter of the interior parametrization of the hull boundary.
    pub radius: Option<f64>,
    pub map_residual: Option<f64>,
    pub circle_residual: f64,
    pub annulus: Annulus,
}

/// A point `g_t` of an integral curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub map: CircleMap,
    pub hull: Option<ExteriorMap>,
    pub diagnostics: Diagnostics,
}

/// One line of a trajectory export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub t: f64,
    pub capacity: Option<f64>,
    /// `sup_j |g_t(ξ_j) − e^{2πiα} ξ_j|`.
    pub distance_to_rotation: f64,
    pub circle_residual: f64,
    pub annulus: [f64; 2],
}

impl FlowState {
    fn new(t: f64, map: CircleMap, hull: Option<ExteriorMap>, radius: Option<f64>) -> Self {
        let diagnostics = Diagnostics {
            capacity: hull.as_ref().map(|h| h.capacity()),
            capacity_error: hull.as_ref().map(|h| (h.capacity() - t).abs()),
            radius,
            map_residual: hull.as_ref().map(|h| h.residual()),
            circle_residual: map.circle_residual(),
            annulus: map.annulus(),
        };
        FlowState {
            t,
            map,
            hull,
            diagnostics,
        }
    }

    pub fn summary(&self) -> FlowSummary {
        FlowSummary {
            t: self.t,
            capacity: self.diagnostics.capacity,
            distance_to_rotation: distance_to_rotation(&self.map),
            circle_residual: self.diagnostics.circle_residual,
            annulus: [self.diagnostics.annulus.inner, self.diagnostics.annulus.outer],
        }
    }
}

/// `sup_j |g(ξ_j) − e^{2πiα} ξ_j|` with `α` the stored rotation number.
pub fn distance_to_rotation(g: &CircleMap) -> f64 {
    let lambda = Complex64::cis(TAU * g.alpha());
    g.grid()
        .points()
        .into_iter()
        .map(|z| (g.on_circle(z) - lambda * z).norm())
        .fold(0.0, f64::max)
}

/// Finds `x` in `[x_min, x_max]` with `capacity(family(x)) = target` by a
/// secant iteration safeguarded by bisection once a bracket is known.
/// `family` is increasing in `x`. Parameters where the family cannot be
/// mapped (curve degenerates, leaves a certified domain) shrink the usable
/// range; a target above every reachable capacity is reported as
/// [`Error::BeyondHullFamily`].
pub fn solve_capacity(
    target: f64,
    guess: f64,
    x_min: f64,
    x_max: f64,
    family: impl Fn(f64) -> Result<ExteriorMap>,
) -> Result<(f64, ExteriorMap)> {
    let mut upper = x_max;
    let mut upper_state = None::<bool>; // Some(true): evaluated fine, Some(false): failed
    let mut lo: Option<(f64, f64)> = None;
    let mut hi: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;
    let mut best: Option<(f64, f64, ExteriorMap)> = None;
    let mut x = guess.clamp(x_min, upper);
    for _ in 0..200 {
        let mut cand = match family(x) {
            Ok(map) => {
                let f = map.capacity() - target;
                if f.abs() <= CAPACITY_TOL {
                    return Ok((x, map));
                }
                if x == upper {
                    upper_state = Some(true);
                }
                if f < 0.0 && lo.map_or(true, |(l, _)| x > l) {
                    lo = Some((x, f));
                }
                if f > 0.0 && hi.map_or(true, |(h, _)| x < h) {
                    hi = Some((x, f));
                }
                let cand = match prev {
                    Some((xp, fp)) if fp != f => x - f * (x - xp) / (f - fp),
                    _ => x - f,
                };
                prev = Some((x, f));
                if best.as_ref().map_or(true, |b| f.abs() < b.0) {
                    best = Some((f.abs(), x, map));
                }
                cand
            }
            Err(Error::MissingLinearizer) => return Err(Error::MissingLinearizer),
            Err(_) => {
                upper = x;
                upper_state = Some(false);
                prev = None;
                f64::NAN
            }
        };
        match (lo, hi) {
            (Some((l, _)), Some((h, _))) => {
                if h - l <= 4.0 * f64::EPSILON * (1.0 + l.abs().max(h.abs())) {
                    let (_, xb, map) = best.expect("bracket implies an evaluation");
                    return Ok((xb, map));
                }
                if !(cand > l && cand < h) {
                    cand = 0.5 * (l + h);
                }
            }
            (Some((l, fl)), None) => {
                if !(cand > l && cand < upper) {
                    if upper_state.is_none() {
                        cand = upper;
                    } else {
                        if upper_state == Some(true) || upper - l <= 1e-9 * (1.0 + l.abs()) {
                            return Err(Error::BeyondHullFamily {
                                t: target,
                                max_capacity: fl + target,
                            });
                        }
                        cand = 0.5 * (l + upper);
                    }
                }
            }
            (None, Some((h, _))) => {
                if !(cand < h) || !cand.is_finite() {
                    cand = h - 1.0;
                }
                if cand < x_min {
                    if x == x_min {
                        return Err(Error::InvalidArgument(format!(
                            "capacity {target} lies below the hull family"
                        )));
                    }
                    cand = x_min;
                }
            }
            (None, None) => {
                // only failures so far: back off towards the lower end
                cand = if x_min.is_finite() {
                    0.5 * (x_min + upper)
                } else {
                    upper - 1.0
                };
                if upper - x_min <= 1e-9 {
                    return Err(Error::BeyondHullFamily {
                        t: target,
                        max_capacity: f64::NEG_INFINITY,
                    });
                }
            }
        }
        x = cand;
    }
    Err(Error::NonConvergence {
        what: "capacity reparametrization",
        detail: format!("target {target}, best residual {:e}", best.map_or(f64::NAN, |b| b.0)),
    })
}

/// Exact flow `Φ_t(g)` for a map carrying a linearizer.
pub fn phi_exact(g: &CircleMap, t: f64) -> Result<FlowState> {
    phi_exact_with(g, t, MapOptions::default())
}

pub fn phi_exact_with(g: &CircleMap, t: f64, opts: MapOptions) -> Result<FlowState> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("flow time must be nonnegative, got {t}")));
    }
    let h = g.linearizer().ok_or(Error::MissingLinearizer)?;
    if t == 0.0 {
        return Ok(FlowState::new(0.0, g.clone(), Some(ExteriorMap::dilation(0.0)), Some(1.0)));
    }
    let grid = g.grid();
    let alpha = g.alpha();
    if h.is_identity() {
        let map = CircleMap::rotation_unchecked(alpha, grid);
        return Ok(FlowState::new(t, map, Some(ExteriorMap::dilation(t)), Some(t.exp())));
    }
    let x_max = (FAMILY_MARGIN * h.annulus().outer).ln();
    let (x, exterior) = solve_capacity(t, t, 0.0, x_max, |x| {
        exterior_map(&confmap::hull_from_conjugacy(h, x.exp(), grid)?, opts)
    })?;
    let r = x.exp();
    let k = ConformalConjugacy::Welded(Box::new(Welded {
        exterior: exterior.clone(),
        inner: InnerMap::Circle {
            map: h.clone(),
            radius: r,
        },
    }));
    let map = CircleMap::linearizable_unchecked(alpha, k, grid)?;
    Ok(FlowState::new(t, map, Some(exterior), Some(r)))
}

/// `g^f_t = ψ_t ∘ f ∘ φ_t` for the compact `K_t = H({|w| <= ρ(t)})` of
/// capacity `t` of a linearizable germ `f`.
pub fn germ_state(germ: &Germ, t: f64, grid: Grid) -> Result<FlowState> {
    let h = &germ.linearizer;
    let trivial = match h {
        crate::germ::GermLinearizer::Moebius { c } => c.norm() == 0.0,
        crate::germ::GermLinearizer::Polynomial { coeffs } => coeffs.iter().all(|a| a.norm() == 0.0),
    };
    if trivial {
        let map = CircleMap::rotation_unchecked(germ.alpha, grid);
        return Ok(FlowState::new(t, map, Some(ExteriorMap::dilation(t)), Some(t.exp())));
    }
    let x_max = (FAMILY_MARGIN * h.certified_radius()).ln();
    let (x, exterior) = solve_capacity(t, t, f64::NEG_INFINITY, x_max, |x| {
        exterior_map(&confmap::hull_from_germ(h, x.exp(), grid)?, MapOptions::default())
    })?;
    let rho = x.exp();
    let k = ConformalConjugacy::Welded(Box::new(Welded {
        exterior: exterior.clone(),
        inner: InnerMap::Germ {
            map: h.clone(),
            radius: rho,
        },
    }));
    let map = CircleMap::linearizable_unchecked(germ.alpha, k, grid)?;
    Ok(FlowState::new(t, map, Some(exterior), Some(rho)))
}

/// `χ`, `X(g)` and the measure they come from.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorField {
    /// `χ(z) = z H(z)` as a Laurent series (powers `z^1, z^0, z^{-1}, ...`).
    pub chi: Laurent,
    /// `X(g)(ξ_j)` on the grid.
    pub x_samples: Vec<Complex64>,
    /// `X(g)` refitted as a Laurent series.
    pub x: Laurent,
    /// The 2-conformal measure `μ₂` of `g` (not reflected).
    pub measure: CircleMeasure,
}

impl GeneratorField {
    pub fn herglotz(&self, z: Complex64) -> Complex64 {
        self.chi.eval(z) / z
    }
}

pub fn generator(g: &CircleMap) -> Result<GeneratorField> {
    generator_with(g, &SolveOptions::default())
}

pub fn generator_with(g: &CircleMap, opts: &SolveOptions) -> Result<GeneratorField> {
    let grid = g.grid();
    let measure = measures::conformal_measure_solve(g, 2.0, opts)?;
    let field = HerglotzField::new(&measure.reflect());
    let n = grid.n - 1;
    let a = field.laurent(n);
    // χ = Σ a_k z^{1-k}: symmetric layout with half = n
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for (k, &ak) in a.iter().enumerate() {
        let power = 1 - k as i64;
        coeffs[(power + n as i64) as usize] = ak;
    }
    let chi = Laurent::from_symmetric(coeffs).trimmed(1e-18);
    let x_samples: Vec<Complex64> = grid
        .points()
        .into_iter()
        .map(|z| g.deriv_on_circle(z) * chi.eval(z) - chi.eval(g.on_circle(z)))
        .collect();
    let x = Laurent::from_samples(&x_samples, n, 1e-17);
    Ok(GeneratorField {
        chi,
        x_samples,
        x,
        measure,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Euler,
    Midpoint,
}

/// `g + dt·X(g)` projected back to the circle and refitted.
fn step(g: &CircleMap, x: &[Complex64], dt: f64, t: f64) -> Result<CircleMap> {
    let samples: Vec<Complex64> = g
        .samples()
        .into_iter()
        .zip(x)
        .map(|(gz, xz)| {
            let v = gz + dt * xz;
            v / v.norm()
        })
        .collect();
    let next = CircleMap::from_samples(&samples, g.grid(), g.alpha(), Provenance::Estimated)?;
    let residual = next.circle_residual();
    let limit = 10.0 * TOL_EVAL;
    if residual > limit {
        return Err(Error::StepRejected { t, residual, limit });
    }
    Ok(track_linearizer(g, next))
}

/// Carries the linearizer of `g` over to the refitted step by Newton
/// refinement; the rotation number is re-solved alongside, so rounding in
/// the step cannot pin it artificially. Without a linearizer, or when the
/// refinement fails, `next` is left to the Galerkin solver.
fn track_linearizer(g: &CircleMap, next: CircleMap) -> CircleMap {
    let Some(guess) = g.linearizer().and_then(|h| h.fourier_form(g.grid()).ok()) else {
        return next;
    };
    match next.newton_linearizer(&guess, g.alpha()) {
        Ok((h, beta)) => next.with_linearizer(h).with_rotation(RotationNumber {
            value: beta,
            provenance: Provenance::Estimated,
        }),
        Err(_) => next,
    }
}

/// Integrates `ġ = X(g)` with fixed steps. The rotation number of `g0` is
/// carried along (the flow preserves it) and tagged as estimated.
pub fn integrate_flow(
    g0: &CircleMap,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<Vec<FlowState>> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let steps = (t_end / dt).round() as usize;
    let mut g = g0.clone();
    let mut states = vec![FlowState::new(0.0, g.clone(), None, None)];
    for n in 0..steps {
        let t = n as f64 * dt;
        let x = generator(&g)?.x_samples;
        g = match scheme {
            Scheme::Euler => step(&g, &x, dt, t)?,
            Scheme::Midpoint => {
                let half = step(&g, &x, 0.5 * dt, t)?;
                let xm = generator(&half)?.x_samples;
                step(&g, &xm, dt, t)?
            }
        };
        states.push(FlowState::new((n + 1) as f64 * dt, g.clone(), None, None));
    }
    Ok(states)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerOptions {
    /// Radius of the circle carrying the difference quotient.
    pub r0: f64,
    pub n_moments: usize,
    /// Smallest Toeplitz eigenvalue tolerated (negated).
    pub pd_tol: f64,
}

impl Default for LoewnerOptions {
    fn default() -> Self {
        LoewnerOptions {
            r0: 1.2,
            n_moments: 64,
            pd_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerMeasure {
    pub measure: CircleMeasure,
    /// Moments `μ̂(0..=n)` read from the difference quotient.
    pub moments: Vec<Complex64>,
    /// Capacity increment `s − t` actually realized by the two hulls.
    pub increment: f64,
    /// Constant Laurent coefficient before normalization.
    pub raw_c0: f64,
    /// Its expected value `(e^h − 1)/h`.
    pub expected_c0: f64,
    pub clipped_mass: f64,
    pub min_eigenvalue: f64,
}

/// Driving measure from the right difference quotient
/// `(ψ_t∘φ_s − id)/(s − t)` on `|z| = R₀`: its ratio to `z` approximates the
/// Herglotz transform, whose Laurent coefficients are the moments.
pub fn loewner_measure(
    earlier: &FlowState,
    later: &FlowState,
    opts: &LoewnerOptions,
) -> Result<LoewnerMeasure> {
    let (Some(phi_t), Some(phi_s)) = (&earlier.hull, &later.hull) else {
        return Err(Error::InvalidArgument(
            "Loewner measure needs states carrying hull maps".into(),
        ));
    };
    let h = phi_s.capacity() - phi_t.capacity();
    if !(h > 0.0 && h <= 1e-2 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "capacity increment must lie in (0, 1e-2], got {h}"
        )));
    }
    let grid = earlier.map.grid();
    let m = grid.size();
    let n = opts.n_moments.min(m / 2 - 1);
    let samples = grid
        .angles()
        .into_iter()
        .map(|th| {
            let z = Complex64::from_polar(opts.r0, th);
            Ok((phi_t.inverse(phi_s.eval(z)?)? - z) / (h * z))
        })
        .collect::<Result<Vec<_>>>()?;
    let c = spectral::forward(&samples);
    let raw_c0 = c[0].re;
    let mut moments = vec![Complex64::new(1.0, 0.0)];
    let mut scale = 1.0;
    for k in 1..=n {
        scale *= opts.r0;
        moments.push(c[m - k] * scale / (2.0 * c[0]));
    }

    let size = n + 1;
    let toeplitz = DMatrix::from_fn(size, size, |i, j| {
        if i >= j {
            moments[i - j]
        } else {
            moments[j - i].conj()
        }
    });
    let min_eigenvalue = toeplitz
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -opts.pd_tol {
        return Err(Error::NotPositiveDefinite { min_eigenvalue });
    }

    // density Σ_{|k|<=n} μ̂(k) e^{ikθ}
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for (k, &mk) in moments.iter().enumerate() {
        coeffs[n + k] = mk;
        coeffs[n - k] = mk.conj();
    }
    let series = Laurent::from_symmetric(coeffs);
    let raw: Vec<f64> = series.to_samples(m).iter().map(|v| v.re).collect();
    let clipped_mass = raw.iter().map(|&x| (-x).max(0.0)).sum::<f64>() / m as f64;
    let density = raw.into_iter().map(|x| x.max(0.0)).collect();
    let measure = CircleMeasure::from_density(grid, density)?.normalized();
    Ok(LoewnerMeasure {
        measure,
        moments,
        increment: h,
        raw_c0,
        expected_c0: h.exp_m1() / h,
        clipped_mass,
        min_eigenvalue,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardEntry {
    pub t: f64,
    pub distance: f64,
    pub capacity_error: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardReport {
    pub entries: Vec<BackwardEntry>,
    /// Distances strictly decrease as `t` decreases.
    pub strictly_decreasing: bool,
}

/// `‖g^f_t − R_α‖` along a decreasing list of times.
pub fn backward_limit_check(germ: &Germ, t_list: &[f64], grid: Grid) -> Result<BackwardReport> {
    let mut entries = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let state = germ_state(germ, t, grid)?;
        entries.push(BackwardEntry {
            t,
            distance: distance_to_rotation(&state.map),
            capacity_error: state.diagnostics.capacity_error.unwrap_or(0.0),
            radius: state.diagnostics.radius.unwrap_or(f64::NAN),
        });
    }
    let strictly_decreasing = entries.windows(2).all(|w| w[1].distance < w[0].distance);
    Ok(BackwardReport {
        entries,
        strictly_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circlemap::GOLDEN_MEAN;

    fn moebius_map(n: usize) -> CircleMap {
        let h = ConformalConjugacy::moebius(Complex64::new(0.3, 0.0)).unwrap();
        CircleMap::linearizable(GOLDEN_MEAN, h, Grid::new(n)).unwrap()
    }

    #[test]
    fn rotations_are_fixed_points() {
        let g = CircleMap::rotation(GOLDEN_MEAN, Grid::new(64)).unwrap();
        let s = phi_exact(&g, 0.1).unwrap();
        assert!(s.map.sup_distance(&g) < 1e-15);
        let x = generator(&g).unwrap();
        assert!(x.x_samples.iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn exact_state_has_requested_capacity() {
        let g = moebius_map(128);
        let s = phi_exact(&g, 0.1).unwrap();
        assert!(s.diagnostics.capacity_error.unwrap() < 1e-12);
        assert!(s.map.circle_residual() < 1e-10);
        let est = s.map.estimate_rotation_number(10_000);
        assert!((est.value - GOLDEN_MEAN).abs() < 1e-3);
    }

    #[test]
    fn generator_is_tangent_to_circle_maps() {
        let g = moebius_map(128);
        let x = generator(&g).unwrap();
        for (z, v) in g.grid().points().into_iter().zip(&x.x_samples) {
            let ratio = v / (Complex64::i() * g.on_circle(z));
            assert!(ratio.im.abs() < 1e-10, "{ratio}");
        }
        assert!((x.herglotz(Complex64::new(1e8, 0.0)) - 1.0).norm() < 1e-7);
    }

    #[test]
    fn beyond_family_is_reported() {
        let g = moebius_map(64);
        match phi_exact(&g, 5.0) {
            Err(Error::BeyondHullFamily { .. }) => {}
            other => panic!("expected BeyondHullFamily, got {other:?}"),
        }
    }

    #[test]
    fn linear_germ_gives_rotation() {
        let germ = Germ::linear(GOLDEN_MEAN);
        let rep = backward_limit_check(&germ, &[-1.0, -2.0], Grid::new(64)).unwrap();
        assert!(rep.entries.iter().all(|e| e.distance < 1e-15));
    }
}
