//! Exact normal ordering for noncommutative polynomial algebras.
//!
//! A [`GeneratorTable`] fixes an ordered set of generators (coordinates before
//! momenta) and swap rules `x_i x_j = x_j x_i + R_ij` for `i > j`. Every
//! [`NCPoly`] is stored in the resulting normal form with coefficients that are
//! polynomials in a formal central `ħ` over the Gaussian rationals.

use thiserror::Error;

use crate::expr::ParseError;

pub mod catalog;
mod coeff;
mod ncpoly;
mod ops;
mod table;

pub use coeff::Coeff;
pub use ncpoly::NCPoly;
pub use ops::{
    at_unit_hbar, commutator, is_real_classical, multiply, normal_order, quantize, substitute, table_relations,
    verify_relations, Prescription, Relation, RelationCheck, RelationReport, Substitution,
};
pub use table::{GenKind, Generator, GeneratorTable, TableBuilder, TermMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("negative exponent on non-Laurent generator {0}")]
    NegativeExponent(String),
    #[error("table mismatch: {0} vs {1}")]
    TableMismatch(String, String),
    #[error("no image for generator {0}")]
    UndefinedImage(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
}
