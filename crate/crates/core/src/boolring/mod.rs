//! Arithmetic in the Boolean ring `GF(2)[v_1..v_n] / (v_i^2 + v_i)`.
//!
//! Every element is a squarefree polynomial: products are set unions of
//! variables and sums are symmetric differences of monomial sets.

mod anf;
mod monomial;
mod order;
mod poly;
mod text;
mod vars;

pub use anf::{anf_from_truth_table, truth_table, MAX_ANF_VARS};
pub use monomial::Monomial;
pub use order::{leading_monomial, MonomialOrder, OrderDoc, OrderKind};
pub use poly::{mono_mul, poly_add, poly_eval, poly_mul, Assignment, BoolPoly};
pub use text::{format_monomial, format_poly, parse_poly, Display};
pub use vars::{Variable, VariableDoc, VariableTable, MAX_VARIABLES};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("too many variables: {0}")]
    TooManyVariables(usize),
    #[error("variable code '{0}' must be an ASCII letter")]
    InvalidCode(char),
    #[error("duplicate variable code '{0}'")]
    DuplicateCode(char),
    #[error("expected exactly one class variable, found {0}")]
    ClassCount(usize),
    #[error("the class variable must be the last variable")]
    ClassNotLast,
    #[error("unknown variable '{0}'")]
    UnknownVariable(char),
    #[error("variable {0} has no value in the assignment")]
    UnassignedVariable(usize),
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("precedence must be a permutation of the table's variables")]
    BadPrecedence,
    #[error("unknown monomial order '{0}'")]
    UnknownOrder(String),
    #[error("truth table has {actual} entries, expected {expected}")]
    TruthTableSize { expected: usize, actual: usize },
    #[error("parse error at byte {at}: {message}")]
    Parse { at: usize, message: String },
}
