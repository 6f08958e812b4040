//! Hodograph conformal maps for planar harmonic functions that vanish on a
//! boundary arc.
//!
//! The pipeline: solve for a positive harmonic `v` vanishing on `∂Ω`, build
//! its conjugate and the map `Θ = (v̄, v)`, transport a second harmonic `u`
//! to `U = u ∘ Θ⁻¹`, reflect `U` oddly across `{Y = 0}` and count critical
//! points on both sides.

pub mod analytic;
pub mod critical;
pub mod error;
pub mod geometry;
pub mod hodograph;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod sequence;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::{cplx, Cplx, Real, Vec2};

pub type Domain64 = geometry::Domain<f64>;
pub type Domain32 = geometry::Domain<f32>;
