//! Response and request bodies. Every response carries `api_version`.

use serde::{Deserialize, Serialize};

use lad_core::boolring::{format_poly, OrderDoc, VariableDoc, VariableTable};
use lad_core::dataset::PatternTable;
use lad_core::rules::{count_selection, Polarity, Rule};
use lad_core::workflow::{ExceptionCandidate, ExcisionDoc, InsightCandidate, Phase};

pub const API_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Health {
    pub api_version: u32,
    pub status: String,
    pub tool_version: String,
    pub session: Option<SessionMeta>,
    /// Whether review UI assets are being served.
    pub ui: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionMeta {
    pub id: String,
    pub variables: String,
    pub records: usize,
    pub observed_patterns: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateView {
    pub api_version: u32,
    pub session_id: String,
    pub sequence: u64,
    pub cycle: u32,
    pub phase: Phase,
    /// Insight rounds already decided in this cycle.
    pub round: usize,
    pub variables: Vec<VariableDoc>,
    pub order: OrderDoc,
    pub records: usize,
    pub observed_patterns: usize,
    pub active_records: usize,
    pub active_patterns: usize,
    pub active_unobserved_exponent: u128,
    pub i_generators: usize,
    pub j_generators: usize,
    pub excised: Vec<ExcisionDoc>,
    /// Candidates presented in the current phase.
    pub candidates: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateList<T> {
    pub api_version: u32,
    pub sequence: u64,
    pub cycle: u32,
    pub round: usize,
    pub candidates: Vec<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleView {
    pub polarity: Polarity,
    pub criterion: String,
    pub factored: String,
    pub factors: Vec<String>,
    pub support: usize,
    pub class_positive: usize,
    /// `support(class_positive)`
    pub counts: String,
    pub variable_count: u32,
    pub agree: usize,
    pub exception_ids: Vec<String>,
    pub record_ids: Vec<String>,
}

impl RuleView {
    pub fn new(rule: &Rule, active: &PatternTable) -> Self {
        let table = active.table();
        let record_ids = count_selection(&rule.criterion, active)
            .map(|s| s.record_ids())
            .unwrap_or_default();
        Self {
            polarity: rule.polarity,
            criterion: format_poly(&rule.criterion, table),
            factored: rule.display_factored(table),
            factors: rule.factors.iter().map(|f| format_poly(f, table)).collect(),
            support: rule.support,
            class_positive: rule.class_positive(),
            counts: rule.counts_label(),
            variable_count: rule.variable_count(),
            agree: rule.agree,
            exception_ids: rule.exception_ids.clone(),
            record_ids,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InsightView {
    /// Accept with this string.
    pub id: String,
    pub source: String,
    pub remainder: String,
    pub variable_count: u32,
    pub max_support: usize,
    pub rules: Vec<RuleView>,
}

impl InsightView {
    pub fn new(c: &InsightCandidate, active: &PatternTable) -> Self {
        let table = active.table();
        Self {
            id: c.id(table),
            source: format_poly(&c.source, table),
            remainder: format_poly(&c.remainder, table),
            variable_count: c.variable_count(table),
            max_support: c.max_support(),
            rules: c.rules.iter().map(|r| RuleView::new(r, active)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExceptionView {
    /// The pattern key; accept with this string.
    pub id: String,
    pub class: bool,
    pub remainder: String,
    pub monomials: usize,
    pub variable_count: u32,
    pub multiplicity: usize,
    pub record_ids: Vec<String>,
}

impl ExceptionView {
    pub fn new(c: &ExceptionCandidate, table: &VariableTable) -> Self {
        Self {
            id: c.key.clone(),
            class: c.bits & table.class_mask() != 0,
            remainder: format_poly(&c.remainder, table),
            monomials: c.remainder.len(),
            variable_count: c.variable_count(table),
            multiplicity: c.multiplicity(),
            record_ids: c.record_ids.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionKind {
    Insight,
    Exception,
}

/// `POST /decisions`. An empty `ids` (and `records`) list ends the phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionRequest {
    pub kind: DecisionKind,
    pub ids: Vec<String>,
    pub sequence: u64,
    /// Record ids to excise individually (exception phase only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternView {
    pub api_version: u32,
    pub key: String,
    pub class: bool,
    /// Variable codes set in the pattern.
    pub high: Vec<char>,
    pub multiplicity: usize,
    pub active_ids: Vec<String>,
    pub excised_ids: Vec<String>,
    /// Raw values, when the session was started from records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<RecordView>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordView {
    pub id: String,
    pub class: bool,
    pub values: Vec<FeatureValue>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureValue {
    pub feature: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub api_version: u32,
    pub status: u16,
    pub error: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<u64>,
}
