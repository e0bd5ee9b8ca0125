//! The iterative algorithm: insights into 𝓙 (inner loop), exceptions into
//! 𝓘 (outer loop), then a report of the rules in the basis of 𝓙 and their
//! generalizations.
//!
//! Decisions come from a [`DecisionProvider`]: a policy, a recorded trace,
//! or a person driving the session through the HTTP service.

mod policy;
mod report;
mod session;
mod trace;
mod verify;

pub use policy::{
    drive, replay, run_policy, DecisionProvider, ExceptionPolicy, PolicyDoc, PolicyProvider, RelevancePolicy,
    TraceProvider,
};
pub use report::{
    final_report, ExcisionDoc, Report, ReportContext, ReportSummary, RuleDoc, REPORT_FORMAT, REPORT_VERSION,
};
pub use session::{start_session, ExceptionCandidate, Excision, InsightCandidate, Phase, SessionState};
pub use trace::{DecisionTrace, ExceptionDecision, TraceCycle, TRACE_FORMAT, TRACE_VERSION};
pub use verify::{verify_rules, Mismatch, VerificationResult};

use thiserror::Error;

use crate::boolring::RingError;
use crate::dataset::DatasetError;
use crate::doc::DocError;
use crate::rules::RuleError;

#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error("no observed patterns")]
    EmptyPatterns,
    #[error("session is in the {actual} phase, not the {expected} phase")]
    WrongPhase { expected: Phase, actual: Phase },
    #[error("cycle {cycle}, {phase} phase: {item} is not a presented candidate")]
    NotACandidate { cycle: u32, phase: Phase, item: String },
    #[error("cycle {cycle}, {phase} phase: {message}")]
    Replay { cycle: u32, phase: Phase, message: String },
    #[error("invalid policy: {0}")]
    Policy(String),
    #[error("report does not match the data: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Doc(#[from] DocError),
}
