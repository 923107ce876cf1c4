//! Probability measures on the circle and the s-conformal measures of a
//! circle diffeomorphism.
//!
//! Densities are sampled on the map grid and taken relative to `dθ/2π`, so
//! the mass of the absolutely continuous part is the mean of the samples.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circlemap::CircleMap;
use crate::error::{Error, Result};
use crate::spectral::{self, Antiderivative, Grid, Laurent, PeriodicSeries};

pub const TOL_MASS: f64 = 1e-12;
pub const DIVISOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: f64,
    pub mass: f64,
}

/// Finite measure on the circle: sampled density plus atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMeasure {
    grid: Grid,
    density: Vec<f64>,
    atoms: Vec<Atom>,
}

impl CircleMeasure {
    pub fn zero(grid: Grid) -> Self {
        CircleMeasure {
            grid,
            density: vec![0.0; grid.size()],
            atoms: Vec::new(),
        }
    }

    pub fn lebesgue(grid: Grid) -> Self {
        CircleMeasure {
            grid,
            density: vec![1.0; grid.size()],
            atoms: Vec::new(),
        }
    }

    pub fn dirac(angle: f64, grid: Grid) -> Self {
        CircleMeasure {
            grid,
            density: vec![0.0; grid.size()],
            atoms: vec![Atom {
                angle: spectral::wrap(angle),
                mass: 1.0,
            }],
        }
    }

    /// Nonnegative density samples (relative to `dθ/2π`), not normalized.
    pub fn from_density(grid: Grid, density: Vec<f64>) -> Result<Self> {
        if density.len() != grid.size() {
            return Err(Error::InvalidArgument(format!(
                "expected {} density samples, got {}",
                grid.size(),
                density.len()
            )));
        }
        if let Some(j) = density.iter().position(|&x| !(x >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "density sample {j} is negative or NaN: {}",
                density[j]
            )));
        }
        Ok(CircleMeasure {
            grid,
            density,
            atoms: Vec::new(),
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_density(grid, grid.angles().into_iter().map(f).collect())
    }

    pub fn with_atom(mut self, angle: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::InvalidArgument(format!("atom mass must be positive, got {mass}")));
        }
        self.atoms.push(Atom {
            angle: spectral::wrap(angle),
            mass,
        });
        Ok(self)
    }

    /// `Σ w_i μ_i` for measures on a common grid.
    pub fn combination(parts: &[(f64, &CircleMeasure)]) -> Result<Self> {
        let grid = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?
            .1
            .grid;
        let mut out = CircleMeasure::zero(grid);
        for (w, mu) in parts {
            if mu.grid != grid {
                return Err(Error::InvalidArgument("measures on different grids".into()));
            }
            for (d, x) in out.density.iter_mut().zip(&mu.density) {
                *d += w * x;
            }
            out.atoms.extend(mu.atoms.iter().map(|a| Atom {
                angle: a.angle,
                mass: w * a.mass,
            }));
        }
        Ok(out)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn absolutely_continuous_mass(&self) -> f64 {
        self.density.iter().sum::<f64>() / self.density.len() as f64
    }

    pub fn singular_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.absolutely_continuous_mass() + self.singular_mass()
    }

    pub fn normalized(mut self) -> Self {
        let m = self.total_mass();
        if m > 0.0 {
            self.density.iter_mut().for_each(|x| *x /= m);
            self.atoms.iter_mut().for_each(|a| a.mass /= m);
        }
        self
    }

    pub fn singular_part(&self) -> CircleMeasure {
        CircleMeasure {
            grid: self.grid,
            density: vec![0.0; self.grid.size()],
            atoms: self.atoms.clone(),
        }
    }

    pub fn absolutely_continuous_part(&self) -> CircleMeasure {
        CircleMeasure {
            grid: self.grid,
            density: self.density.clone(),
            atoms: Vec::new(),
        }
    }

    /// Pull-back by the conjugation `r(ξ) = conj ξ` (an involution, so also
    /// the push-forward).
    pub fn reflect(&self) -> CircleMeasure {
        let m = self.density.len();
        CircleMeasure {
            grid: self.grid,
            density: (0..m).map(|j| self.density[(m - j) % m]).collect(),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    angle: spectral::wrap(-a.angle),
                    mass: a.mass,
                })
                .collect(),
        }
    }

    /// Fourier moment `μ̂(k) = ∫ conj(ξ)^k dμ`.
    pub fn moment(&self, k: i64) -> Complex64 {
        self.moments(k.unsigned_abs() as usize)
            .get(k.unsigned_abs() as usize)
            .map(|&c| if k >= 0 { c } else { c.conj() })
            .unwrap_or_default()
    }

    /// `μ̂(0..=n)`. Density moments beyond the grid Nyquist limit vanish.
    pub fn moments(&self, n: usize) -> Vec<Complex64> {
        let m = self.density.len();
        let c = spectral::forward_real(&self.density);
        (0..=n)
            .map(|k| {
                let dens = if k < m / 2 { c[k] } else { Complex64::new(0.0, 0.0) };
                let atoms: Complex64 = self
                    .atoms
                    .iter()
                    .map(|a| a.mass * Complex64::cis(-(k as f64) * a.angle))
                    .sum();
                dens + atoms
            })
            .collect()
    }

    pub fn density_series(&self) -> PeriodicSeries {
        PeriodicSeries::from_samples(&self.density, 1e-17)
    }

    /// `μ([a, b])` for the counterclockwise arc from `a` to `b >= a`.
    pub fn arc_mass(&self, a: f64, b: f64) -> f64 {
        let anti = Antiderivative::new(&self.density);
        anti.integral(a, b) / TAU
            + self
                .atoms
                .iter()
                .filter(|x| in_arc(x.angle, a, b))
                .map(|x| x.mass)
                .sum::<f64>()
    }
}

fn in_arc(x: f64, a: f64, b: f64) -> bool {
    (x - a).rem_euclid(TAU) <= b - a
}

/// `g_* μ`: density `(f∘g⁻¹)·|(g⁻¹)'|`, atoms moved by `g`.
pub fn pushforward(mu: &CircleMeasure, g: &CircleMap) -> Result<CircleMeasure> {
    if mu.grid != g.grid() {
        return Err(Error::InvalidArgument("measure and map on different grids".into()));
    }
    let f = mu.density_series();
    let pre = g.preimage_angles(&mu.grid.angles());
    let density = pre
        .iter()
        .map(|&t| f.eval(t) / g.deriv_on_circle(Complex64::cis(t)).norm())
        .collect();
    let atoms = mu
        .atoms
        .iter()
        .map(|a| Atom {
            angle: spectral::wrap(g.on_circle(Complex64::cis(a.angle)).arg()),
            mass: a.mass,
        })
        .collect();
    Ok(CircleMeasure {
        grid: mu.grid,
        density,
        atoms,
    })
}

/// Closed-form s-conformal measure of a linearizable map `g = h∘R_α∘h⁻¹`:
/// density `c |h'∘h⁻¹|^{s−1}`.
pub fn conformal_measure_oracle(g: &CircleMap, s: f64) -> Result<CircleMeasure> {
    let h = g.linearizer().ok_or(Error::MissingLinearizer)?;
    let density = g
        .grid()
        .points()
        .into_iter()
        .map(|xi| Ok(h.deriv(h.inverse(xi)?)?.norm().powf(s - 1.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CircleMeasure::from_density(g.grid(), density)?.normalized())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Linearizer when attached, Fourier–Galerkin otherwise.
    Auto,
    /// Coefficientwise division in linearizing coordinates.
    Linearizer,
    /// Least-squares Fourier–Galerkin solve of `u∘g − u = b` with the given
    /// number of modes (`0` picks it from the decay of `log|g'|`).
    Galerkin { modes: usize },
    /// Cesàro-averaged Birkhoff sums along orbits.
    Birkhoff { iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub method: SolveMethod,
    pub divisor_floor: f64,
    /// Value of `f` before normalization at the additive constant; the
    /// normalized result must not depend on it.
    pub initial_normalization: f64,
    /// Largest accepted defining-equation residual for the fallback solvers.
    pub residual_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: SolveMethod::Auto,
            divisor_floor: DIVISOR_FLOOR,
            initial_normalization: 1.0,
            residual_tol: 1e-8,
        }
    }
}

/// Solves `f∘g = |g'|^{s−1} f` for the normalized density via the
/// cohomological equation `u∘g − u = (s−1) log|g'|`, `u = log f`.
pub fn conformal_measure_solve(g: &CircleMap, s: f64, opts: &SolveOptions) -> Result<CircleMeasure> {
    let method = match opts.method {
        SolveMethod::Auto if g.linearizer().is_some() => SolveMethod::Linearizer,
        SolveMethod::Auto => SolveMethod::Galerkin { modes: 0 },
        m => m,
    };
    let grid = g.grid();
    let log_f = match method {
        SolveMethod::Linearizer => solve_linearized(g, s, opts)?,
        SolveMethod::Galerkin { modes } => solve_galerkin(g, s, modes, opts)?,
        SolveMethod::Birkhoff { iterations } => solve_birkhoff(g, s, iterations, opts)?,
        SolveMethod::Auto => unreachable!(),
    };
    let shift = log_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let density = log_f.iter().map(|u| (u - shift).exp()).collect();
    Ok(CircleMeasure::from_density(grid, density)?.normalized())
}

fn log_derivative(g: &CircleMap, s: f64, z: Complex64) -> f64 {
    (s - 1.0) * g.deriv_on_circle(z).norm().ln()
}

fn solve_linearized(g: &CircleMap, s: f64, opts: &SolveOptions) -> Result<Vec<f64>> {
    let h = g.linearizer().ok_or(Error::MissingLinearizer)?;
    let grid = g.grid();
    let m = grid.size();
    // right-hand side in linearizing coordinates
    let rhs = grid
        .points()
        .into_iter()
        .map(|w| Ok(log_derivative(g, s, h.forward(w)?)))
        .collect::<Result<Vec<_>>>()?;
    let b = spectral::forward_real(&rhs);
    let half = m / 2 - 1;
    let alpha = g.alpha();
    let mut v = vec![Complex64::new(0.0, 0.0); 2 * half + 1];
    v[half] = Complex64::new(opts.initial_normalization.ln(), 0.0);
    for k in 1..=half as i64 {
        let divisor = Complex64::cis(TAU * k as f64 * alpha) - 1.0;
        if divisor.norm() < opts.divisor_floor {
            return Err(Error::SmallDivisor {
                k,
                divisor: divisor.norm(),
                floor: opts.divisor_floor,
            });
        }
        let bk = b[k as usize];
        v[half + k as usize] = bk / divisor;
        v[half - k as usize] = (bk / divisor).conj();
    }
    let v = Laurent::from_symmetric(v).trimmed(1e-18);
    grid.points()
        .into_iter()
        .map(|xi| Ok(v.eval_angle(h.inverse(xi)?.arg()).re))
        .collect()
}

/// Number of Fourier modes carrying `b` above rounding level.
fn significant_modes(b: &[f64]) -> usize {
    let c = spectral::forward_real(b);
    let m = b.len();
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    (1..m / 2)
        .rev()
        .find(|&k| c[k].norm() > 1e-15 * scale)
        .unwrap_or(1)
}

fn solve_galerkin(g: &CircleMap, s: f64, modes: usize, opts: &SolveOptions) -> Result<Vec<f64>> {
    let grid = g.grid();
    let m = grid.size();
    let pts = grid.points();
    let b: Vec<f64> = pts.iter().map(|&z| log_derivative(g, s, z)).collect();
    if b.iter().all(|x| x.abs() < 1e-300) {
        return Ok(vec![0.0; m]);
    }
    let k_max = if modes == 0 {
        (2 * significant_modes(&b) + 8).min(m / 4).max(4)
    } else {
        modes.min(m / 2 - 1)
    };
    // collocation on a uniform sub-grid; e^{ikG(θ)} = g(e^{iθ})^k on the circle
    let rows = (4 * k_max).min(m);
    let stride = m / rows;
    let basis = |j: usize| -> (Vec<Complex64>, Vec<Complex64>) {
        let z = pts[j];
        let gz = g.on_circle(z);
        let mut zk = Complex64::new(1.0, 0.0);
        let mut gk = Complex64::new(1.0, 0.0);
        let mut a = Vec::with_capacity(k_max);
        let mut c = Vec::with_capacity(k_max);
        for _ in 0..k_max {
            zk *= z;
            gk *= gz;
            a.push(zk);
            c.push(gk);
        }
        (a, c)
    };
    let collocation: Vec<usize> = (0..m).step_by(stride).collect();
    let mut mat = DMatrix::<f64>::zeros(collocation.len(), 2 * k_max);
    let mut rhs = DVector::<f64>::zeros(collocation.len());
    for (i, &j) in collocation.iter().enumerate() {
        let (zk, gk) = basis(j);
        for k in 0..k_max {
            let d = gk[k] - zk[k];
            mat[(i, 2 * k)] = d.re;
            mat[(i, 2 * k + 1)] = d.im;
        }
        rhs[i] = b[j];
    }
    let coef = mat
        .svd(true, true)
        .solve(&rhs, 1e-13)
        .map_err(|e| Error::NonConvergence {
            what: "Galerkin conformal-measure solve",
            detail: e.to_string(),
        })?;
    let mut u = vec![opts.initial_normalization.ln(); m];
    let mut worst: f64 = 0.0;
    for j in 0..m {
        let (zk, gk) = basis(j);
        let mut lhs = 0.0;
        for k in 0..k_max {
            let (cr, ci) = (coef[2 * k], coef[2 * k + 1]);
            u[j] += cr * zk[k].re + ci * zk[k].im;
            lhs += cr * (gk[k] - zk[k]).re + ci * (gk[k] - zk[k]).im;
        }
        worst = worst.max((lhs - b[j]).abs());
    }
    if worst > opts.residual_tol {
        return Err(Error::NonConvergence {
            what: "Galerkin conformal-measure solve",
            detail: format!(
                "cohomological residual {worst:e} exceeds {:e} with {k_max} modes",
                opts.residual_tol
            ),
        });
    }
    Ok(u)
}

fn solve_birkhoff(
    g: &CircleMap,
    s: f64,
    iterations: usize,
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    let grid = g.grid();
    let pts = grid.points();
    let n = iterations.max(1);
    // u = −(1/n) Σ_{m=1}^{n} S_m b, S_m b = Σ_{j<m} b∘g^j
    let u: Vec<f64> = pts
        .iter()
        .map(|&z0| {
            let mut z = z0;
            let mut partial = 0.0;
            let mut acc = 0.0;
            for _ in 0..n {
                partial += log_derivative(g, s, z);
                acc += partial;
                z = g.on_circle(z);
                z /= z.norm();
            }
            opts.initial_normalization.ln() - acc / n as f64
        })
        .collect();
    let series = PeriodicSeries::from_samples(&u, 0.0);
    let worst = pts
        .iter()
        .zip(&u)
        .map(|(&z, &uz)| {
            (series.eval(g.on_circle(z).arg()) - uz - log_derivative(g, s, z)).abs()
        })
        .fold(0.0, f64::max);
    if worst > opts.residual_tol {
        return Err(Error::NonConvergence {
            what: "Birkhoff conformal-measure solve",
            detail: format!(
                "cohomological residual {worst:e} exceeds {:e} after {n} iterations",
                opts.residual_tol
            ),
        });
    }
    Ok(u)
}

/// `sup_j |f(g(ξ_j)) − |g'(ξ_j)|^{s−1} f(ξ_j)|` for the density of `μ`.
pub fn density_residual(mu: &CircleMeasure, g: &CircleMap, s: f64) -> f64 {
    let f = mu.density_series();
    g.grid()
        .points()
        .into_iter()
        .zip(mu.density())
        .map(|(z, &fz)| {
            let lhs = f.eval(g.on_circle(z).arg());
            (lhs - g.deriv_on_circle(z).norm().powf(s - 1.0) * fz).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalReport {
    pub max_residual: f64,
    pub n_arcs: usize,
    pub seed: u64,
    pub s: f64,
}

/// Compares `μ(g(E))` with `∫_E |g'|^s dμ` on seeded random arcs.
pub fn verify_conformal(
    mu: &CircleMeasure,
    g: &CircleMap,
    s: f64,
    n_arcs: usize,
    seed: u64,
) -> ConformalReport {
    let grid = mu.grid;
    let pts = grid.points();
    let weighted: Vec<f64> = pts
        .iter()
        .zip(&mu.density)
        .map(|(&z, &f)| g.deriv_on_circle(z).norm().powf(s) * f)
        .collect();
    let rhs_anti = Antiderivative::new(&weighted);
    let lift = g.lift();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_arcs {
        let a = rng.gen_range(0.0..TAU);
        let b = a + rng.gen_range(0.0..TAU);
        let (ga, gb) = (lift.eval(a), lift.eval(b));
        let lhs = mu.arc_mass(ga, gb);
        let rhs = rhs_anti.integral(a, b) / TAU
            + mu
                .atoms
                .iter()
                .filter(|x| in_arc(x.angle, a, b))
                .map(|x| x.mass * g.deriv_on_circle(Complex64::cis(x.angle)).norm().powf(s))
                .sum::<f64>();
        worst = worst.max((lhs - rhs).abs());
    }
    ConformalReport {
        max_residual: worst,
        n_arcs,
        seed,
        s,
    }
}

/// Fourier-moment metric `max_{|k| <= n} |μ̂₁(k) − μ̂₂(k)|`.
pub fn weak_distance(mu1: &CircleMeasure, mu2: &CircleMeasure, n_moments: usize) -> f64 {
    mu1.moments(n_moments)
        .iter()
        .zip(mu2.moments(n_moments))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circlemap::GOLDEN_MEAN;
    use crate::conjugacy::ConformalConjugacy;

    fn moebius_map(a: f64, n: usize) -> CircleMap {
        let h = ConformalConjugacy::moebius(Complex64::new(a, 0.0)).unwrap();
        CircleMap::linearizable(GOLDEN_MEAN, h, Grid::new(n)).unwrap()
    }

    #[test]
    fn lebesgue_has_unit_mass_and_no_moments() {
        let mu = CircleMeasure::lebesgue(Grid::new(64));
        assert!((mu.total_mass() - 1.0).abs() < 1e-15);
        assert!(mu.moment(3).norm() < 1e-15);
    }

    #[test]
    fn dirac_moments_and_weak_distance() {
        let g = Grid::new(64);
        let d = CircleMeasure::dirac(0.0, g);
        let l = CircleMeasure::lebesgue(g);
        assert!((weak_distance(&d, &l, 4) - 1.0).abs() < 1e-14);
        assert_eq!(weak_distance(&d, &d, 4), 0.0);
    }

    #[test]
    fn rotation_solver_gives_lebesgue() {
        let g = CircleMap::rotation(GOLDEN_MEAN, Grid::new(64)).unwrap();
        let mu = conformal_measure_solve(&g, 2.0, &SolveOptions::default()).unwrap();
        assert!(mu.density().iter().all(|&x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn solver_matches_oracle_for_moebius() {
        let g = moebius_map(0.3, 256);
        let oracle = conformal_measure_oracle(&g, 2.0).unwrap();
        let solved = conformal_measure_solve(&g, 2.0, &SolveOptions::default()).unwrap();
        let gap = oracle
            .density()
            .iter()
            .zip(solved.density())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-10, "gap {gap:e}");
        assert!(density_residual(&solved, &g, 2.0) < 1e-10);
    }

    #[test]
    fn galerkin_matches_oracle() {
        let g = moebius_map(0.3, 256);
        let oracle = conformal_measure_oracle(&g, 2.0).unwrap();
        let opts = SolveOptions {
            method: SolveMethod::Galerkin { modes: 0 },
            ..Default::default()
        };
        let solved = conformal_measure_solve(&g, 2.0, &opts).unwrap();
        assert!(weak_distance(&oracle, &solved, 32) < 1e-10);
    }

    #[test]
    fn small_divisor_floor_reports_frequency() {
        let g = moebius_map(0.3, 64);
        let opts = SolveOptions {
            divisor_floor: 0.5,
            ..Default::default()
        };
        match conformal_measure_solve(&g, 2.0, &opts) {
            Err(Error::SmallDivisor { k, .. }) => assert!(k >= 1),
            other => panic!("expected small divisor, got {other:?}"),
        }
    }

    #[test]
    fn lebesgue_is_not_two_conformal_for_moebius() {
        let g = moebius_map(0.3, 128);
        let leb = CircleMeasure::lebesgue(g.grid());
        let rep = verify_conformal(&leb, &g, 2.0, 50, 7);
        assert!(rep.max_residual > 1e-2);
        let mu = conformal_measure_oracle(&g, 2.0).unwrap();
        assert!(verify_conformal(&mu, &g, 2.0, 50, 7).max_residual < 1e-10);
    }

    #[test]
    fn pushforward_moves_atoms_and_keeps_mass() {
        let g = moebius_map(0.3, 128);
        let d = CircleMeasure::dirac(1.0, g.grid());
        let p = pushforward(&d, &g).unwrap();
        let target = g.on_circle(Complex64::cis(1.0)).arg();
        assert!((p.atoms()[0].angle - spectral::wrap(target)).abs() < 1e-14);
        let mu = CircleMeasure::from_fn(g.grid(), |t| 1.0 + 0.5 * t.cos()).unwrap();
        let q = pushforward(&mu, &g).unwrap();
        assert!((q.total_mass() - 1.0).abs() < 1e-12);
    }
}
