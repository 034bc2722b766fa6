//! Workbench for open Toda systems: phase spaces and Poisson structures, Lax
//! families and their flows, exact normal ordering of quantum operators,
//! Schrödinger spectra, and the gl(n) Lie–Poisson structure with its star product.

pub mod exact;
pub mod expr;
pub mod flow;
pub mod lax;
pub mod liepoisson;
pub mod linalg;
pub mod ncalg;
pub mod phase;
pub mod poly;
pub mod scalar;
pub mod spectral;
pub mod verify;

pub use exact::{GaussianRational, Rational};
pub use scalar::Real;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type RationalMatrix = linalg::Matrix<Rational>;
pub type RationalPoly = poly::Poly<Rational>;
