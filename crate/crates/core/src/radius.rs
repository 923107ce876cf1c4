//! Conformal radius of the linearization domains `D_t` along the flow of a
//! linearizable germ, and the boundary identities tying it to the Herglotz
//! transform of the flow's 2-conformal measures:
//!
//! `P_t∘k_t = (r'/r)|k_t'|` and `k̇_t/k_t + i Q_t∘k_t = 0`,
//!
//! with `k_t = ψ_t∘H(ρ(t)·)` the inverse welding on the circle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{self, FlowState};
use crate::germ::Germ;
use crate::herglotz::HerglotzField;
use crate::measures;
use crate::spectral::{self, Grid};

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusTrace {
    pub grid: Grid,
    pub ts: Vec<f64>,
    /// Conformal radius `r(t) = r(D_t, 0)`; the germ linearizer is
    /// normalized by `H'(0) = 1`, so this is the level `ρ(t)`.
    pub radii: Vec<f64>,
    pub capacities: Vec<f64>,
    /// `k_t(ξ_j)` per time.
    pub welding: Vec<Vec<Complex64>>,
    /// Centered differences `r'(t)` at interior times.
    pub dr: Vec<Option<f64>>,
    /// Centered differences `k̇_t(ξ_j)` at interior times.
    pub dk: Vec<Option<Vec<Complex64>>>,
    pub states: Vec<FlowState>,
}

impl RadiusTrace {
    /// `sup_j |k_{t_{i+1}}(ξ_j) − k_{t_i}(ξ_j)|` for consecutive times.
    pub fn welding_steps(&self) -> Vec<f64> {
        self.welding
            .windows(2)
            .map(|w| {
                w[0].iter()
                    .zip(&w[1])
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    pub fn strictly_increasing(&self) -> bool {
        self.radii.windows(2).all(|w| w[1] > w[0])
    }
}

pub fn radius_trace(germ: &Germ, t_list: &[f64], grid: Grid) -> Result<RadiusTrace> {
    if t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("times must be strictly increasing".into()));
    }
    let mut states = Vec::with_capacity(t_list.len());
    let mut radii = Vec::with_capacity(t_list.len());
    let mut capacities = Vec::with_capacity(t_list.len());
    let mut welding = Vec::with_capacity(t_list.len());
    let pts = grid.points();
    for &t in t_list {
        let state = flow::germ_state(germ, t, grid)?;
        radii.push(state.diagnostics.radius.unwrap_or(t.exp()));
        capacities.push(state.diagnostics.capacity.unwrap_or(t));
        let k = state.map.linearizer().ok_or(Error::MissingLinearizer)?;
        let samples = pts.iter().map(|&z| k.forward(z)).collect::<Result<Vec<_>>>()?;
        welding.push(samples);
        states.push(state);
    }
    let n = t_list.len();
    let mut dr = vec![None; n];
    let mut dk = vec![None; n];
    for i in 1..n.saturating_sub(1) {
        let span = t_list[i + 1] - t_list[i - 1];
        dr[i] = Some((radii[i + 1] - radii[i - 1]) / span);
        dk[i] = Some(
            welding[i + 1]
                .iter()
                .zip(&welding[i - 1])
                .map(|(a, b)| (a - b) / span)
                .collect(),
        );
    }
    Ok(RadiusTrace {
        grid,
        ts: t_list.to_vec(),
        radii,
        capacities,
        welding,
        dr,
        dk,
        states,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEntry {
    pub t: f64,
    pub r: f64,
    pub capacity: f64,
    pub dlog_r: f64,
    /// `sup |P_t∘k_t − (r'/r)|k_t'||`.
    pub residual_real: f64,
    /// `sup |k̇_t/k_t + i Q_t∘k_t|`.
    pub residual_imag: f64,
    /// `|mean(P_t∘k_t) − r'/r|`.
    pub mean_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub entries: Vec<RadiusEntry>,
}

/// Evaluates both boundary identities at every interior time of the trace.
/// `P_t + iQ_t` is the boundary value of the Herglotz transform of the
/// reflected 2-conformal measure of `g_t`.
pub fn verify_radius_identities(trace: &RadiusTrace) -> Result<RadiusReport> {
    let mut entries = Vec::new();
    for i in 0..trace.ts.len() {
        let (Some(dr), Some(dk)) = (trace.dr[i], &trace.dk[i]) else {
            continue;
        };
        let g = &trace.states[i].map;
        let mu = measures::conformal_measure_oracle(g, 2.0)?;
        let field = HerglotzField::new(&mu.reflect());
        let k = &trace.welding[i];
        let m = k.len();
        let dlog_r = dr / trace.radii[i];

        // |k'| from the spectral derivative of the lifted angle
        let mut angle: Vec<f64> = k.iter().map(|z| z.arg()).collect();
        spectral::unwrap(&mut angle);
        let theta = trace.grid.angles();
        let periodic: Vec<f64> = angle.iter().zip(&theta).map(|(a, t)| a - t).collect();
        let speed: Vec<f64> = spectral::derivative(&periodic).iter().map(|d| 1.0 + d).collect();

        let mut residual_real: f64 = 0.0;
        let mut residual_imag: f64 = 0.0;
        let mut mean = 0.0;
        for j in 0..m {
            let b = field.boundary_at(k[j].arg());
            residual_real = residual_real.max((b.re - dlog_r * speed[j]).abs());
            residual_imag =
                residual_imag.max((dk[j] / k[j] + Complex64::new(0.0, b.im)).norm());
            mean += b.re;
        }
        mean /= m as f64;
        entries.push(RadiusEntry {
            t: trace.ts[i],
            r: trace.radii[i],
            capacity: trace.capacities[i],
            dlog_r,
            residual_real,
            residual_imag,
            mean_gap: (mean - dlog_r).abs(),
        });
    }
    Ok(RadiusReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circlemap::GOLDEN_MEAN;

    #[test]
    fn linear_germ_has_exponential_radius() {
        let germ = Germ::linear(GOLDEN_MEAN);
        let trace = radius_trace(&germ, &[0.0, 0.1, 0.2], Grid::new(32)).unwrap();
        for (t, r) in trace.ts.iter().zip(&trace.radii) {
            assert!((r - t.exp()).abs() < 1e-14);
        }
        let rep = verify_radius_identities(&trace).unwrap();
        let e = &rep.entries[0];
        assert!(e.residual_imag < 1e-12);
        // centered difference of e^t: r'/r = sinh(h)/h
        assert!((e.dlog_r - (0.1f64).sinh() / 0.1).abs() < 1e-12);
    }
}
