//! Logical data analysis over Boolean polynomial rings.
//!
//! A labelled binary dataset is turned into the ideal of selection criteria
//! that select no observed record. Gröbner bases of that ideal yield
//! positive and negative classification rules, refined in an
//! expert-in-the-loop workflow that tracks accepted insights and exceptions.

pub mod boolring;
pub mod dataset;
pub mod doc;
pub mod gbasis;
pub mod ideals;
pub mod rules;
pub mod workflow;

pub use boolring::{BoolPoly, Monomial, MonomialOrder, OrderKind, VariableTable};

/// Version string embedded in every exported document.
pub const TOOL_VERSION: &str = concat!("lad ", env!("CARGO_PKG_VERSION"));
