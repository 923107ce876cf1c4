use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rotation number {alpha} is not admissible: {reason}")]
    InadmissibleRotation { alpha: f64, reason: String },

    #[error("point {z} lies outside the certified annulus ({rho_in}, {rho_out})")]
    OutsideAnnulus {
        z: Complex64,
        rho_in: f64,
        rho_out: f64,
    },

    #[error("annulus mismatch: image of inner map meets ({img_in}, {img_out}), outer map certified on ({rho_in}, {rho_out})")]
    AnnulusMismatch {
        img_in: f64,
        img_out: f64,
        rho_in: f64,
        rho_out: f64,
    },

    #[error("map is not univalent near the unit circle: {0}")]
    NotUnivalent(String),

    #[error("no linearizer attached to the circle map")]
    MissingLinearizer,

    #[error("small divisor at frequency k = {k}: |exp(2 pi i k alpha) - 1| = {divisor:e} below floor {floor:e}")]
    SmallDivisor { k: i64, divisor: f64, floor: f64 },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("exterior map did not converge after {iterations} iterations (last update {residual:e})")]
    MapNonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("point {0} is not in the exterior of the closed unit disk")]
    NotExterior(Complex64),

    #[error("curve rejected: {0}")]
    InvalidCurve(String),

    #[error("capacity {t} is beyond the certified hull family (largest reachable capacity {max_capacity})")]
    BeyondHullFamily { t: f64, max_capacity: f64 },

    #[error("superlevel set {{|Q| > {threshold}}} unresolved: only {points} grid points")]
    Unresolved { threshold: f64, points: usize },

    #[error("moment sequence is not positive definite: smallest Toeplitz eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("flow step at t = {t} rejected: circle residual {residual:e} exceeds {limit:e}")]
    StepRejected { t: f64, residual: f64, limit: f64 },

    #[error("welding is not monotone at sample {index}")]
    NonMonotoneWelding { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
