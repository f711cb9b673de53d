//! Exact decision procedures and analysis tools for ordered Abelian groups.
//!
//! * [`syntax`], [`parse`], [`normal`]: formulas, the ASCII grammar and the
//!   canonical linear form of terms.
//! * [`model`]: exact oracle models used to evaluate and cross-check.
//! * [`qe`]: quantifier elimination for the divisible, Presburger, mixed
//!   real/integer, coset and Hamel projection theories.
//! * [`discrete`]: difference sets, motifs, periods and arithmetic
//!   progression decompositions of discrete sets.
//! * [`pattern`]: finite checks of inp- and ict-pattern witnesses.

pub mod error;
pub mod model;
pub mod normal;
pub mod par;
pub mod parse;

pub mod discrete;
pub mod pattern;
pub mod qe;
mod print;
pub mod scalar;
pub mod syntax;

pub use error::{Error, Result};
pub use model::{Assignment, ModelElement, OracleModel};
pub use normal::{normalize_term, NormalTerm};
pub use parse::parse;
pub use scalar::Scalar;
pub use syntax::{Atom, Formula, Signature, Term};
