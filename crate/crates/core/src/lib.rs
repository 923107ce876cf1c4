//! Loewner evolution of invariant hulls of analytic circle diffeomorphisms.
//!
//! The crate follows one analytic circle map `g` with irrational rotation
//! number through its 2-conformal measure, the Herglotz transform of that
//! measure, and the capacity-parametrized family of invariant hulls whose
//! exterior maps conjugate `g` to the flow `g_t`.
//!
//! All sampled objects share the uniform grid of [`spectral::Grid`].
//! Measure densities are relative to normalized Lebesgue measure `dθ/2π`.

pub mod circlemap;
pub mod confmap;
pub mod conjugacy;
pub mod error;
pub mod flow;
pub mod germ;
pub mod herglotz;
pub mod measures;
pub mod radius;
pub mod serial;
pub mod spectral;

pub use circlemap::{CircleMap, Provenance, RotationNumber, GOLDEN_MEAN};
pub use confmap::{ExteriorMap, JordanCurve};
pub use conjugacy::{Annulus, ConformalConjugacy};
pub use error::{Error, Result};
pub use germ::Germ;
pub use herglotz::HerglotzField;
pub use measures::CircleMeasure;
pub use num_complex::Complex64;
pub use spectral::Grid;
