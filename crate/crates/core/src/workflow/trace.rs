use serde::{Deserialize, Serialize};

use crate::doc::{check_header, DocError};

pub const TRACE_FORMAT: &str = "lad-trace";
pub const TRACE_VERSION: u32 = 1;

/// Accepted decisions per cycle. Insight rounds hold canonical polynomial
/// strings; a cycle whose exception list is empty is the last one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTrace {
    pub format: String,
    pub version: u32,
    pub cycles: Vec<TraceCycle>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCycle {
    pub cycle: u32,
    #[serde(default)]
    pub insight_rounds: Vec<Vec<String>>,
    #[serde(default)]
    pub exceptions: Vec<ExceptionDecision>,
}

/// A pattern key, record ids, or both (a subset of that pattern's records).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionDecision {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub record_ids: Vec<String>,
}

impl ExceptionDecision {
    pub fn pattern(key: &str) -> Self {
        Self {
            pattern: Some(key.to_string()),
            record_ids: Vec::new(),
        }
    }

    pub fn records<S: AsRef<str>>(ids: &[S]) -> Self {
        Self {
            pattern: None,
            record_ids: ids.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }
}

impl Default for DecisionTrace {
    fn default() -> Self {
        Self::new()
    }
}

impl DecisionTrace {
    pub fn new() -> Self {
        Self {
            format: TRACE_FORMAT.to_string(),
            version: TRACE_VERSION,
            cycles: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let trace: DecisionTrace = serde_json::from_str(text)?;
        check_header(&trace.format, trace.version, TRACE_FORMAT, TRACE_VERSION)?;
        trace.validate()?;
        Ok(trace)
    }

    pub fn to_json(&self) -> String {
        crate::doc::to_json_string(self)
    }

    /// Cycles numbered 1, 2, ... and no empty insight rounds.
    pub fn validate(&self) -> Result<(), DocError> {
        for (i, c) in self.cycles.iter().enumerate() {
            if c.cycle as usize != i + 1 {
                return Err(DocError::Invalid(format!(
                    "trace cycle {} listed at position {}",
                    c.cycle,
                    i + 1
                )));
            }
            if c.insight_rounds.iter().any(|r| r.is_empty()) {
                return Err(DocError::Invalid(format!(
                    "trace cycle {} has an empty insight round",
                    c.cycle
                )));
            }
            if c.exceptions
                .iter()
                .any(|e| e.pattern.is_none() && e.record_ids.is_empty())
            {
                return Err(DocError::Invalid(format!(
                    "trace cycle {} has an empty exception entry",
                    c.cycle
                )));
            }
        }
        Ok(())
    }

    pub fn cycle(&self, cycle: u32) -> Option<&TraceCycle> {
        self.cycles.get((cycle as usize).checked_sub(1)?)
    }

    pub(crate) fn current_mut(&mut self, cycle: u32) -> &mut TraceCycle {
        while self.cycles.len() < cycle as usize {
            let n = self.cycles.len() as u32 + 1;
            self.cycles.push(TraceCycle {
                cycle: n,
                insight_rounds: Vec::new(),
                exceptions: Vec::new(),
            });
        }
        &mut self.cycles[cycle as usize - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut t = DecisionTrace::new();
        t.current_mut(1).insight_rounds.push(vec!["FyTs + FTs".into()]);
        t.current_mut(1).exceptions.push(ExceptionDecision::records(&["2237"]));
        t.current_mut(2);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(
            json,
            r#"{"format":"lad-trace","version":1,"cycles":[{"cycle":1,"insight_rounds":[["FyTs + FTs"]],"exceptions":[{"record_ids":["2237"]}]},{"cycle":2,"insight_rounds":[],"exceptions":[]}]}"#
        );
        assert_eq!(DecisionTrace::from_json(&json).unwrap(), t);
    }

    #[test]
    fn rejects_malformed_traces() {
        let skip = r#"{"format":"lad-trace","version":1,"cycles":[{"cycle":2}]}"#;
        assert!(DecisionTrace::from_json(skip).is_err());
        let empty_round = r#"{"format":"lad-trace","version":1,"cycles":[{"cycle":1,"insight_rounds":[[]]}]}"#;
        assert!(DecisionTrace::from_json(empty_round).is_err());
        let wrong = r#"{"format":"lad-report","version":1,"cycles":[]}"#;
        assert!(matches!(DecisionTrace::from_json(wrong), Err(DocError::Format { .. })));
    }
}
