//! Shared plumbing for the versioned JSON documents.

use thiserror::Error;

use crate::boolring::RingError;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected a '{expected}' document, found '{found}'")]
    Format { expected: &'static str, found: String },
    #[error("unsupported {format} schema version {found} (expected {expected})")]
    Version {
        format: &'static str,
        expected: u32,
        found: u32,
    },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn check_header(
    format: &str,
    version: u32,
    expected_format: &'static str,
    expected_version: u32,
) -> Result<(), DocError> {
    if format != expected_format {
        return Err(DocError::Format {
            expected: expected_format,
            found: format.to_string(),
        });
    }
    if version != expected_version {
        return Err(DocError::Version {
            format: expected_format,
            expected: expected_version,
            found: version,
        });
    }
    Ok(())
}

/// Pretty JSON with a trailing newline; the output is byte-stable for equal values.
pub fn to_json_string<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
