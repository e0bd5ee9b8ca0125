//! Numeric records, class-count thresholds, pattern tables and the
//! generator of the ideal of empty selection criteria.

mod patterns;
mod records;
mod thresholds;

#[allow(unused_imports)]
pub(crate) use patterns::record_bits;
pub use patterns::{
    binarize, build_sigma, count_empty_criteria, parse_pattern_key, pattern_indicator, pattern_key, Pattern,
    PatternEntry, PatternTable, PatternsDoc, PATTERNS_FORMAT, PATTERNS_VERSION,
};
pub use records::{parse_records, ClassColumn, FeatureColumn, Record, RecordTable, VariableMap};
pub use thresholds::{
    compute_thresholds, Deviation, DeviationsDoc, ThresholdResult, Thresholds, ThresholdsDoc, DEVIATIONS_FORMAT,
    THRESHOLDS_FORMAT, THRESHOLDS_VERSION,
};

use thiserror::Error;

use crate::boolring::RingError;

/// Input errors; `line` is the 1-based line in the source file (the header
/// is line 1), or 0 when the input did not come from a file.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("line {line}: empty value in column '{column}'")]
    EmptyCell { line: usize, column: String },
    #[error("line {line}: column '{column}' has non-numeric value '{value}'")]
    NonNumeric { line: usize, column: String, value: String },
    #[error("line {line}: unrecognized class label '{value}'")]
    BadClass { line: usize, value: String },
    #[error("line {line}: duplicate record id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    RowLength { line: usize, expected: usize, found: usize },
    #[error("degenerate class balance: {positives} positive of {total} records")]
    DegenerateClasses { positives: usize, total: usize },
    #[error("invalid pattern key '{0}'")]
    BadPatternKey(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}
