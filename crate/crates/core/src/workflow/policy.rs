use serde::{Deserialize, Serialize};

use super::session::{ExceptionCandidate, InsightCandidate, Phase, SessionState};
use super::trace::{DecisionTrace, ExceptionDecision};
use super::WorkflowError;
use crate::boolring::{parse_poly, BoolPoly, VariableTable};

/// Accepts an insight candidate when one of its rules selects at least
/// `min_support` records with at most `max_variables` feature variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevancePolicy {
    pub min_support: usize,
    pub max_variables: u32,
}

impl Default for RelevancePolicy {
    fn default() -> Self {
        Self {
            min_support: 20,
            max_variables: 5,
        }
    }
}

impl RelevancePolicy {
    pub fn accepts(&self, c: &InsightCandidate) -> bool {
        c.rules
            .iter()
            .any(|r| r.support >= self.min_support && r.variable_count() <= self.max_variables)
    }
}

/// Accepts an exception candidate whose remainder is short and whose
/// pattern is rare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionPolicy {
    pub max_monomials: usize,
    pub max_pattern_multiplicity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_variables: Option<u32>,
}

impl Default for ExceptionPolicy {
    fn default() -> Self {
        Self {
            max_monomials: 2,
            max_pattern_multiplicity: 2,
            max_variables: None,
        }
    }
}

impl ExceptionPolicy {
    pub fn accepts(&self, c: &ExceptionCandidate, table: &VariableTable) -> bool {
        c.remainder.len() <= self.max_monomials
            && c.multiplicity() <= self.max_pattern_multiplicity
            && self.max_variables.is_none_or(|m| c.variable_count(table) <= m)
    }
}

/// Both policies, as embedded in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PolicyDoc {
    pub relevance: RelevancePolicy,
    pub exception: ExceptionPolicy,
}

impl PolicyDoc {
    /// Parses `key=value` pairs separated by commas over the defaults.
    ///
    /// Keys: `min_support` (a count or `inf`), `max_variables`,
    /// `max_monomials`, `max_multiplicity`, `max_exception_variables`.
    pub fn parse(text: &str) -> Result<Self, WorkflowError> {
        let mut doc = PolicyDoc::default();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| WorkflowError::Policy(format!("expected key=value, found '{part}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let number = || -> Result<u64, WorkflowError> {
                match value {
                    "inf" => Ok(u64::MAX),
                    _ => value.parse::<u64>().map_err(|_| {
                        WorkflowError::Policy(format!("'{key}' needs a positive integer, found '{value}'"))
                    }),
                }
            };
            let n = number()?;
            if n == 0 {
                return Err(WorkflowError::Policy(format!("'{key}' must be positive")));
            }
            let small = |n: u64| u32::try_from(n).unwrap_or(u32::MAX);
            match key {
                "min_support" => doc.relevance.min_support = usize::try_from(n).unwrap_or(usize::MAX),
                "max_variables" => doc.relevance.max_variables = small(n),
                "max_monomials" => doc.exception.max_monomials = usize::try_from(n).unwrap_or(usize::MAX),
                "max_multiplicity" => doc.exception.max_pattern_multiplicity = usize::try_from(n).unwrap_or(usize::MAX),
                "max_exception_variables" => doc.exception.max_variables = Some(small(n)),
                _ => return Err(WorkflowError::Policy(format!("unknown key '{key}'"))),
            }
        }
        Ok(doc)
    }
}

/// Source of accept/reject decisions for a session.
pub trait DecisionProvider {
    /// Polynomials to accept in the current insight round; empty ends the
    /// inner loop.
    fn insights(&mut self, state: &SessionState) -> Result<Vec<BoolPoly>, WorkflowError>;
    /// Exceptions to accept; empty terminates the session.
    fn exceptions(&mut self, state: &SessionState) -> Result<Vec<ExceptionDecision>, WorkflowError>;
}

pub struct PolicyProvider {
    pub policy: PolicyDoc,
}

impl DecisionProvider for PolicyProvider {
    fn insights(&mut self, state: &SessionState) -> Result<Vec<BoolPoly>, WorkflowError> {
        Ok(state
            .insight_candidates()?
            .iter()
            .filter(|c| self.policy.relevance.accepts(c))
            .map(|c| c.source.clone())
            .collect())
    }

    fn exceptions(&mut self, state: &SessionState) -> Result<Vec<ExceptionDecision>, WorkflowError> {
        let table = state.table();
        Ok(state
            .exception_candidates()?
            .iter()
            .filter(|c| self.policy.exception.accepts(c, table))
            .map(|c| ExceptionDecision::pattern(&c.key))
            .collect())
    }
}

/// Replays a recorded trace; cycles or rounds it does not mention get
/// empty decisions.
pub struct TraceProvider<'a> {
    pub trace: &'a DecisionTrace,
}

impl DecisionProvider for TraceProvider<'_> {
    fn insights(&mut self, state: &SessionState) -> Result<Vec<BoolPoly>, WorkflowError> {
        let Some(round) = self
            .trace
            .cycle(state.cycle())
            .and_then(|c| c.insight_rounds.get(state.round()))
        else {
            return Ok(Vec::new());
        };
        let replay_error = |message: String| WorkflowError::Replay {
            cycle: state.cycle(),
            phase: Phase::Insight,
            message,
        };
        let polys = round
            .iter()
            .map(|s| parse_poly(s, state.table()).map_err(|e| replay_error(format!("cannot read '{s}': {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let candidates = state.insight_candidates()?;
        if let Some((s, _)) = round
            .iter()
            .zip(&polys)
            .find(|(_, p)| !candidates.iter().any(|c| c.matches(p)))
        {
            return Err(replay_error(format!(
                "round {}: '{s}' is not among the {} presented candidates",
                state.round() + 1,
                candidates.len()
            )));
        }
        Ok(polys)
    }

    fn exceptions(&mut self, state: &SessionState) -> Result<Vec<ExceptionDecision>, WorkflowError> {
        Ok(self
            .trace
            .cycle(state.cycle())
            .map(|c| c.exceptions.clone())
            .unwrap_or_default())
    }
}

/// Runs the session to termination with decisions from `provider`.
pub fn drive(state: &SessionState, provider: &mut dyn DecisionProvider) -> Result<SessionState, WorkflowError> {
    let mut state = state.clone();
    loop {
        state = match state.phase() {
            Phase::Insight => {
                let accepted = provider.insights(&state)?;
                state.decide_insights(&accepted)?
            }
            Phase::Exception => {
                let accepted = provider.exceptions(&state)?;
                state.decide_exceptions(&accepted)?
            }
            Phase::Terminated => return Ok(state),
        };
    }
}

pub fn run_policy(
    state: &SessionState,
    relevance: RelevancePolicy,
    exception: ExceptionPolicy,
) -> Result<(SessionState, DecisionTrace), WorkflowError> {
    let mut provider = PolicyProvider {
        policy: PolicyDoc { relevance, exception },
    };
    let done = drive(state, &mut provider)?;
    let trace = done.trace().clone();
    Ok((done, trace))
}

pub fn replay(state: &SessionState, trace: &DecisionTrace) -> Result<SessionState, WorkflowError> {
    let done = drive(state, &mut TraceProvider { trace }).map_err(|e| match e {
        WorkflowError::NotACandidate { cycle, phase, item } => WorkflowError::Replay {
            cycle,
            phase,
            message: format!("{item} is not a presented candidate"),
        },
        other => other,
    })?;
    if trace.cycles.len() > done.cycle() as usize {
        return Err(WorkflowError::Replay {
            cycle: done.cycle() + 1,
            phase: Phase::Terminated,
            message: "trace continues after the session terminated".into(),
        });
    }
    Ok(done)
}
