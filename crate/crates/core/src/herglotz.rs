//! Herglotz transforms on the exterior disk and their boundary values.
//!
//! For a measure `μ` with moments `μ̂(k) = ∫ conj(ξ)^k dμ`,
//! `H(z) = ∫ (ξ + 1/z)/(ξ − 1/z) dμ(ξ) = μ̂(0) + 2 Σ_{k≥1} μ̂(k) z^{-k}`
//! for the density part; atoms are always evaluated in closed form.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::CircleMeasure;
use crate::spectral;

/// Default radial offsets for boundary extrapolation.
pub const DEFAULT_EPS: [f64; 2] = [1e-3, 5e-4];

#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzField {
    source: CircleMeasure,
    /// Density moments `μ̂(k)`, `k = 0..M/2`.
    moments: Vec<Complex64>,
}

fn atom_kernel(angle: f64, z: Complex64) -> Complex64 {
    let xi = Complex64::cis(angle);
    let w = z.inv();
    (xi + w) / (xi - w)
}

impl HerglotzField {
    pub fn new(source: &CircleMeasure) -> Self {
        let m = source.density().len();
        let c = spectral::forward_real(source.density());
        HerglotzField {
            source: source.clone(),
            moments: c[..m / 2].to_vec(),
        }
    }

    pub fn source(&self) -> &CircleMeasure {
        &self.source
    }

    /// Series part `μ̂(0) + 2 Σ μ̂(k) w^k` at `w = 1/z`.
    fn density_part(&self, w: Complex64) -> Complex64 {
        let tail = self.moments[1..]
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| (acc + c) * w);
        self.moments[0] + 2.0 * tail
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() > 1.0) {
            return Err(Error::NotExterior(z));
        }
        let atoms: Complex64 = self
            .source
            .atoms()
            .iter()
            .map(|a| a.mass * atom_kernel(a.angle, z))
            .sum();
        Ok(self.density_part(z.inv()) + atoms)
    }

    /// Laurent coefficients `H = Σ_{k≥0} a_k z^{-k}` of the whole measure,
    /// up to `z^{-n}`.
    pub fn laurent(&self, n: usize) -> Vec<Complex64> {
        let mom = self.source.moments(n);
        mom.iter()
            .enumerate()
            .map(|(k, &c)| if k == 0 { c } else { 2.0 * c })
            .collect()
    }

    /// Samples of `H((1+ε) e^{iθ_j})` on the grid (FFT for the density part).
    fn ring(&self, eps: f64) -> Vec<Complex64> {
        let grid = self.source.grid();
        let m = grid.size();
        let rho = 1.0 + eps;
        let mut c = vec![Complex64::new(0.0, 0.0); m];
        c[0] = self.moments[0];
        let mut scale = 1.0;
        for k in 1..self.moments.len() {
            scale /= rho;
            c[m - k] = 2.0 * self.moments[k] * scale;
        }
        let mut out = spectral::inverse(&c);
        for (j, v) in out.iter_mut().enumerate() {
            let z = Complex64::from_polar(rho, grid.angle(j));
            for a in self.source.atoms() {
                *v += a.mass * atom_kernel(a.angle, z);
            }
        }
        out
    }

    /// Radial limits `P + iQ` on the grid by polynomial (Richardson)
    /// extrapolation in `ε` from the rings `|z| = 1 + ε`.
    pub fn boundary_values(&self, eps_list: &[f64]) -> Result<BoundaryValues> {
        if eps_list.len() < 2 {
            return Err(Error::InvalidArgument(
                "extrapolation needs at least two radial offsets".into(),
            ));
        }
        if eps_list.windows(2).any(|w| !(w[1] < w[0])) || eps_list.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidArgument(
                "radial offsets must be positive and strictly decreasing".into(),
            ));
        }
        let rings: Vec<Vec<Complex64>> = eps_list.iter().map(|&e| self.ring(e)).collect();
        let m = rings[0].len();
        let mut p = Vec::with_capacity(m);
        let mut q = Vec::with_capacity(m);
        let mut flagged = Vec::with_capacity(m);
        for j in 0..m {
            let vals: Vec<Complex64> = rings.iter().map(|r| r[j]).collect();
            let (value, previous) = neville_at_zero(eps_list, &vals);
            let converged = value.is_finite()
                && (value - previous).norm() <= 1e-2 * (1.0 + value.norm());
            p.push(value.re);
            q.push(value.im);
            flagged.push(!converged);
        }
        Ok(BoundaryValues {
            eps: eps_list.to_vec(),
            p,
            q,
            flagged,
        })
    }

    /// Boundary value `P + iQ` at `e^{iθ}` from the series on the circle and
    /// closed-form atom terms (purely imaginary off the reflected atoms).
    pub fn boundary_at(&self, theta: f64) -> Complex64 {
        let w = Complex64::cis(-theta);
        let atoms: f64 = self
            .source
            .atoms()
            .iter()
            .map(|a| -a.mass / ((a.angle + theta) / 2.0).tan())
            .sum();
        self.density_part(w) + Complex64::new(0.0, atoms)
    }

    /// [`boundary_at`](Self::boundary_at) on the grid.
    pub fn boundary_exact(&self) -> BoundaryValues {
        let grid = self.source.grid();
        let vals: Vec<Complex64> = grid.angles().iter().map(|&t| self.boundary_at(t)).collect();
        BoundaryValues {
            eps: Vec::new(),
            p: vals.iter().map(|v| v.re).collect(),
            q: vals.iter().map(|v| v.im).collect(),
            flagged: vals.iter().map(|v| !v.is_finite()).collect(),
        }
    }

    /// `min Re H` over `n_angles` rays at the given radii.
    pub fn min_real_part(&self, radii: &[f64], n_angles: usize) -> Result<f64> {
        let mut lo = f64::INFINITY;
        for &r in radii {
            for j in 0..n_angles {
                let z = Complex64::from_polar(r, TAU * (j as f64 + 0.5) / n_angles as f64);
                lo = lo.min(self.eval(z)?.re);
            }
        }
        Ok(lo)
    }
}

/// `n` log-spaced radii in `(1, r_max]`, starting just outside the circle.
pub fn log_spaced_radii(n: usize, r_max: f64) -> Vec<f64> {
    let lo = (1e-3f64).ln();
    let hi = (r_max - 1.0).ln();
    (0..n)
        .map(|i| 1.0 + (lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

/// Neville extrapolation to `x = 0`; returns the final value and the best
/// estimate one order lower.
fn neville_at_zero(x: &[f64], y: &[Complex64]) -> (Complex64, Complex64) {
    let n = x.len();
    let mut t = y.to_vec();
    let mut previous = t[n - 1];
    for level in 1..n {
        previous = t[n - 1];
        for i in (level..n).rev() {
            let (xi, xj) = (x[i], x[i - level]);
            t[i] = (t[i] * xj - t[i - 1] * xi) / (xj - xi);
        }
    }
    (t[n - 1], previous)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValues {
    pub eps: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// Grid points where the extrapolation did not settle (near atoms).
    pub flagged: Vec<bool>,
}

/// Measures `(π/2) t 1_{|Q| > t} dλ` for each threshold `t`.
///
/// The superlevel sets are resolved on sub-cells of width about `1/(64 t)`
/// inside grid cells that either contain a reflected atom or where the grid
/// values of `|Q|` come within a factor 8 of `t`. The result is carried as
/// one atom per selected sub-cell.
pub fn poltoratski_reconstruct(mu: &CircleMeasure, t_list: &[f64]) -> Result<Vec<CircleMeasure>> {
    let field = HerglotzField::new(mu);
    let grid = mu.grid();
    let m = grid.size();
    let cell = TAU / m as f64;
    let q_grid: Vec<f64> = grid.angles().iter().map(|&t| field.boundary_at(t).im).collect();
    let reflected: Vec<f64> = mu.atoms().iter().map(|a| spectral::wrap(-a.angle)).collect();
    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("threshold must be positive, got {t}")));
        }
        let mut rec = CircleMeasure::zero(grid);
        let mut count = 0usize;
        for j in 0..m {
            let (a, b) = (grid.angle(j), grid.angle(j) + cell);
            let near_atom = reflected.iter().any(|&x| x >= a && x < b);
            let large = q_grid[j].abs().max(q_grid[(j + 1) % m].abs()) > t / 8.0;
            if !near_atom && !large {
                continue;
            }
            let n_sub = ((cell * 64.0 * t).ceil() as usize).max(1);
            let width = cell / n_sub as f64;
            for i in 0..n_sub {
                let mid = a + (i as f64 + 0.5) * width;
                if field.boundary_at(mid).im.abs() > t {
                    count += 1;
                    rec = rec.with_atom(mid, t * width / 4.0)?;
                }
            }
        }
        if count > 0 && count < 4 {
            return Err(Error::Unresolved {
                threshold: t,
                points: count,
            });
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::weak_distance;
    use crate::spectral::Grid;

    #[test]
    fn lebesgue_transform_is_one() {
        let h = HerglotzField::new(&CircleMeasure::lebesgue(Grid::new(64)));
        for z in [Complex64::new(1.5, 0.3), Complex64::new(-4.0, 9.0)] {
            assert!((h.eval(z).unwrap() - 1.0).norm() < 1e-14);
        }
        assert!(h.eval(Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn dirac_transform_is_kernel() {
        let h = HerglotzField::new(&CircleMeasure::dirac(0.7, Grid::new(64)));
        let z = Complex64::new(1.1, -0.4);
        let xi = Complex64::cis(0.7);
        let exact = (xi + 1.0 / z) / (xi - 1.0 / z);
        assert!((h.eval(z).unwrap() - exact).norm() < 1e-14);
        assert!((h.eval(Complex64::new(1e8, 0.0)).unwrap() - 1.0).norm() < 1e-7);
    }

    #[test]
    fn fatou_recovers_reflected_density() {
        let g = Grid::new(128);
        let mu = CircleMeasure::from_fn(g, |t| 1.0 + (t - 0.3).cos()).unwrap();
        let bv = HerglotzField::new(&mu).boundary_values(&DEFAULT_EPS).unwrap();
        let m = g.size();
        for j in 0..m {
            assert!((bv.p[j] - mu.density()[(m - j) % m]).abs() < 1e-6);
        }
    }

    #[test]
    fn atom_conjugate_is_cotangent() {
        let h = HerglotzField::new(&CircleMeasure::dirac(0.0, Grid::new(64)));
        let q = h.boundary_at(0.4).im;
        assert!((q + 1.0 / (0.2f64).tan()).abs() < 1e-12);
    }

    #[test]
    fn poltoratski_recovers_half_atom() {
        let g = Grid::new(256);
        let half = CircleMeasure::combination(&[
            (0.5, &CircleMeasure::lebesgue(g)),
            (0.5, &CircleMeasure::dirac(0.0, g)),
        ])
        .unwrap();
        let recs = poltoratski_reconstruct(&half, &[1e2, 1e3, 1e4]).unwrap();
        let target = half.singular_part().reflect();
        let d: Vec<f64> = recs.iter().map(|r| weak_distance(r, &target, 16)).collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
        assert!((recs[2].total_mass() - 0.5).abs() < 0.025);
    }
}
