//! FFT grids, Laurent/Fourier series and the periodic operators built on them.
//!
//! Every sampled object in the crate lives on the uniform grid
//! `θ_j = 2πj/M`, `j = 0..M`, with `M = 2N`. Fourier coefficients follow
//! `c_k = (1/M) Σ_j f_j e^{-ikθ_j}`, so a band-limited function is
//! `f(θ) = Σ_k c_k e^{ikθ}` and the same coefficients are the Laurent
//! coefficients of its holomorphic extension.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(m: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(m)
        } else {
            p.plan_fft_forward(m)
        }
    })
}

/// Uniform circle grid with `M = 2N` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
}

impl Grid {
    pub const DEFAULT_N: usize = 1024;

    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n >= 4, "grid N must be a power of two >= 4");
        Grid { n }
    }

    pub fn size(&self) -> usize {
        2 * self.n
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.size() as f64
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.size()).map(|j| self.angle(j)).collect()
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.angles().into_iter().map(Complex64::cis).collect()
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::new(Self::DEFAULT_N)
    }
}

/// Signed frequency of FFT slot `i` in a length-`m` transform.
pub fn frequency(i: usize, m: usize) -> i64 {
    if i < m.div_ceil(2) {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

fn slot(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

/// Normalized forward DFT: `c_k = (1/M) Σ f_j e^{-ikθ_j}` in FFT slot order.
pub fn forward(samples: &[Complex64]) -> Vec<Complex64> {
    let m = samples.len();
    let mut buf = samples.to_vec();
    plan(m, false).process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse of [`forward`]: samples from coefficients in FFT slot order.
pub fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    plan(buf.len(), true).process(&mut buf);
    buf
}

pub fn forward_real(samples: &[f64]) -> Vec<Complex64> {
    let c: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward(&c)
}

/// Applies a frequency multiplier to real periodic samples and returns the
/// real part of the result. The Nyquist slot is zeroed.
fn real_multiplier(samples: &[f64], mult: impl Fn(i64) -> Complex64) -> Vec<f64> {
    let m = samples.len();
    let mut c = forward_real(samples);
    for (i, ci) in c.iter_mut().enumerate() {
        let k = frequency(i, m);
        if m % 2 == 0 && i == m / 2 {
            *ci = Complex64::new(0.0, 0.0);
        } else {
            *ci *= mult(k);
        }
    }
    inverse(&c).into_iter().map(|z| z.re).collect()
}

/// Conjugate-function (periodic Hilbert transform) operator,
/// multiplier `-i sgn(k)`.
pub fn conjugate_function(samples: &[f64]) -> Vec<f64> {
    real_multiplier(samples, |k| Complex64::new(0.0, -(k.signum() as f64)))
}

/// Spectral derivative d/dθ of real periodic samples.
pub fn derivative(samples: &[f64]) -> Vec<f64> {
    real_multiplier(samples, |k| Complex64::new(0.0, k as f64))
}

/// Finite two-sided Laurent series `Σ_{k=-half}^{half} c_k z^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Laurent {
    half: usize,
    coeffs: Vec<Complex64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent {
            half: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    /// Builds the series from `coeffs[k + half]`, `k ∈ [-half, half]`.
    pub fn from_symmetric(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "symmetric coefficient list must have odd length");
        let half = coeffs.len() / 2;
        Laurent { half, coeffs }
    }

    /// Single monomial `c z^k`.
    pub fn monomial(k: i64, c: Complex64) -> Self {
        let half = k.unsigned_abs() as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * half + 1];
        coeffs[(k + half as i64) as usize] = c;
        Laurent { half, coeffs }
    }

    /// Coefficients of circle samples, keeping `|k| <= max_half` (and below
    /// the Nyquist frequency), then trimming tail coefficients whose modulus
    /// is below `trim`.
    pub fn from_samples(samples: &[Complex64], max_half: usize, trim: f64) -> Self {
        let m = samples.len();
        let c = forward(samples);
        let half = max_half.min(m / 2 - 1);
        let coeffs = (-(half as i64)..=half as i64).map(|k| c[slot(k, m)]).collect();
        Laurent { half, coeffs }.trimmed(trim)
    }

    /// Drops symmetric tail pairs while both ends are below `tol` in modulus.
    pub fn trimmed(mut self, tol: f64) -> Self {
        let mut h = self.half;
        while h > 0 {
            let lo = self.coeffs[self.half - h].norm();
            let hi = self.coeffs[self.half + h].norm();
            if lo < tol && hi < tol {
                h -= 1;
            } else {
                break;
            }
        }
        if h < self.half {
            let start = self.half - h;
            self.coeffs = self.coeffs[start..start + 2 * h + 1].to_vec();
            self.half = h;
        }
        self
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.half {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.half as i64) as usize]
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let h = self.half;
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (0..=h).rev() {
            pos = pos * z + self.coeffs[h + k];
        }
        if h == 0 {
            return pos;
        }
        let w = z.inv();
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=h).rev() {
            neg = (neg + self.coeffs[h - k]) * w;
        }
        pos + neg
    }

    /// Complex derivative `Σ k c_k z^{k-1}`.
    pub fn deriv(&self, z: Complex64) -> Complex64 {
        let h = self.half;
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (1..=h).rev() {
            pos = pos * z + self.coeffs[h + k] * k as f64;
        }
        if h == 0 {
            return pos;
        }
        let w = z.inv();
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=h).rev() {
            neg = (neg - self.coeffs[h - k] * k as f64) * w;
        }
        pos + neg * w
    }

    pub fn eval_angle(&self, theta: f64) -> Complex64 {
        self.eval(Complex64::cis(theta))
    }

    /// d/dθ of `θ ↦ L(e^{iθ})`.
    pub fn dtheta(&self, theta: f64) -> Complex64 {
        let z = Complex64::cis(theta);
        Complex64::i() * z * self.deriv(z)
    }

    /// Geometric decay rates of the positive and negative tails, read off a
    /// least-squares fit of `log|c_k|` over the significant part of each tail.
    /// Returns `(q_pos, q_neg)` with `|c_k| ≈ C q_pos^k`, `|c_{-k}| ≈ C q_neg^k`.
    pub fn tail_decay(&self, floor: f64) -> (Option<f64>, Option<f64>) {
        let fit = |sign: i64| -> Option<f64> {
            let pts: Vec<(f64, f64)> = (1..=self.half as i64)
                .map(|k| (k as f64, self.coefficient(sign * k).norm()))
                .filter(|&(_, a)| a > floor)
                .map(|(k, a)| (k, a.ln()))
                .collect();
            if pts.len() < 3 {
                return None;
            }
            let tail = &pts[pts.len() / 2..];
            let tail = if tail.len() < 2 { &pts[..] } else { tail };
            let n = tail.len() as f64;
            let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
            let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
            let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            if sxx == 0.0 {
                return None;
            }
            let slope = sxy / sxx;
            (slope < 0.0).then(|| slope.exp())
        };
        (fit(1), fit(-1))
    }

    pub fn scale(&self, s: Complex64) -> Laurent {
        Laurent {
            half: self.half,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Samples on the M-point circle grid (M must exceed `2 half`).
    pub fn to_samples(&self, m: usize) -> Vec<Complex64> {
        assert!(m > 2 * self.half, "grid too small for series");
        let mut c = vec![Complex64::new(0.0, 0.0); m];
        for k in -(self.half as i64)..=self.half as i64 {
            c[slot(k, m)] = self.coefficient(k);
        }
        inverse(&c)
    }
}

/// Real 2π-periodic function given by Fourier coefficients, evaluable at
/// arbitrary angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSeries {
    series: Laurent,
}

impl PeriodicSeries {
    pub fn from_samples(samples: &[f64], trim: f64) -> Self {
        let c: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let m = samples.len();
        PeriodicSeries {
            series: Laurent::from_samples(&c, m / 2 - 1, trim),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.series.eval_angle(theta).re
    }

    pub fn dtheta(&self, theta: f64) -> f64 {
        self.series.dtheta(theta).re
    }

    pub fn mean(&self) -> f64 {
        self.series.coefficient(0).re
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.series.coefficient(k)
    }

    pub fn half(&self) -> usize {
        self.series.half()
    }
}

/// Antiderivative `F(θ) = mean·θ + Σ_{k≠0} c_k e^{ikθ}/(ik)` of a real
/// band-limited function; exact arc integrals for grid-band-limited data.
#[derive(Debug, Clone)]
pub struct Antiderivative {
    mean: f64,
    periodic: Laurent,
}

impl Antiderivative {
    pub fn new(samples: &[f64]) -> Self {
        let m = samples.len();
        let c = forward_real(samples);
        let half = m / 2 - 1;
        let coeffs = (-(half as i64)..=half as i64)
            .map(|k| {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    c[slot(k, m)] / Complex64::new(0.0, k as f64)
                }
            })
            .collect();
        Antiderivative {
            mean: c[0].re,
            periodic: Laurent::from_symmetric(coeffs),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.mean * theta + self.periodic.eval_angle(theta).re
    }

    /// `∫_a^b f dθ` for `b >= a` (the arc may wind past 2π).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.eval(b) - self.eval(a)
    }
}

/// Unwraps a sequence of angles so consecutive differences lie in (-π, π].
pub fn unwrap(angles: &mut [f64]) {
    for i in 1..angles.len() {
        let mut d = angles[i] - angles[i - 1];
        d -= TAU * (d / TAU).round();
        angles[i] = angles[i - 1] + d;
    }
}

/// Wraps an angle into [0, 2π).
pub fn wrap(theta: f64) -> f64 {
    theta.rem_euclid(TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn laurent_matches_closed_form() {
        // z + 0.25/z sampled on the circle
        let g = Grid::new(16);
        let s: Vec<Complex64> = g.points().iter().map(|&z| z + 0.25 / z).collect();
        let l = Laurent::from_samples(&s, 15, 1e-14);
        assert_eq!(l.half(), 1);
        let z = Complex64::new(1.3, -0.4);
        assert!((l.eval(z) - (z + 0.25 / z)).norm() < 1e-14);
        assert!((l.deriv(z) - (1.0 - 0.25 / (z * z))).norm() < 1e-14);
    }

    #[test]
    fn conjugate_of_cos_is_sin() {
        let g = Grid::new(32);
        let s: Vec<f64> = g.angles().iter().map(|t| (3.0 * t).cos()).collect();
        let k = conjugate_function(&s);
        for (j, t) in g.angles().iter().enumerate() {
            assert!((k[j] - (3.0 * t).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn antiderivative_integrates_arcs() {
        let g = Grid::new(32);
        let s: Vec<f64> = g.angles().iter().map(|t| 1.0 + t.cos()).collect();
        let a = Antiderivative::new(&s);
        let exact = |x: f64| x + x.sin();
        let (lo, hi) = (0.3, 0.3 + 1.5 * PI);
        assert!((a.integral(lo, hi) - (exact(hi) - exact(lo))).abs() < 1e-13);
        // full turn
        assert!((a.integral(1.0, 1.0 + TAU) - TAU).abs() < 1e-13);
    }

    #[test]
    fn tail_decay_reads_geometric_rate() {
        let q = 0.5f64;
        let coeffs: Vec<Complex64> = (-20i32..=20)
            .map(|k| Complex64::new(q.powi(k.abs()), 0.0))
            .collect();
        let l = Laurent::from_symmetric(coeffs);
        let (p, n) = l.tail_decay(1e-300);
        assert!((p.unwrap() - q).abs() < 1e-12);
        assert!((n.unwrap() - q).abs() < 1e-12);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let mut a = vec![3.0, -3.0, -2.9];
        unwrap(&mut a);
        assert!((a[1] - (TAU - 3.0)).abs() < 1e-12);
    }
}
