use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::policy::PolicyDoc;
use super::session::{Phase, SessionState};
use super::trace::DecisionTrace;
use super::WorkflowError;
use crate::boolring::{format_poly, OrderDoc, VariableDoc, VariableTable};
use crate::dataset::Thresholds;
use crate::doc::{check_header, DocError};
use crate::rules::{extract_rules, generalize, Polarity, Rule};
use crate::TOOL_VERSION;

pub const REPORT_FORMAT: &str = "lad-report";
pub const REPORT_VERSION: u32 = 1;

/// Inputs recorded in the report besides the session itself.
#[derive(Debug, Clone, Default)]
pub struct ReportContext {
    pub thresholds: Option<Thresholds>,
    pub policy: Option<PolicyDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub variables: Vec<VariableDoc>,
    pub order: OrderDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyDoc>,
    pub trace: DecisionTrace,
    pub summary: ReportSummary,
    /// Reduced basis of 𝓙.
    pub insight_basis: Vec<String>,
    pub rules: Vec<RuleDoc>,
    pub generalizations: Vec<RuleDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub records: usize,
    pub class_positive: usize,
    pub observed_patterns: usize,
    /// `u` in `2^u` criteria selecting no observed pattern.
    pub unobserved_exponent: u128,
    pub cycles: u32,
    /// The same counts after excision.
    pub active_records: usize,
    pub active_patterns: usize,
    pub active_unobserved_exponent: u128,
    pub excised: Vec<ExcisionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcisionDoc {
    pub record_id: String,
    pub pattern: String,
    pub cycle: u32,
}

/// A rule counted on all original records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDoc {
    pub id: String,
    pub polarity: Polarity,
    pub criterion: String,
    pub factors: Vec<String>,
    pub factored: String,
    pub support: usize,
    pub class_positive: usize,
    pub agree: usize,
    pub exception_ids: Vec<String>,
    /// Basis element of 𝓙 the rule was read from.
    pub source: String,
    pub cycle: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

impl RuleDoc {
    fn new(id: String, rule: &Rule, table: &VariableTable, parent: Option<String>) -> Self {
        Self {
            id,
            polarity: rule.polarity,
            criterion: format_poly(&rule.criterion, table),
            factors: rule.factors.iter().map(|f| format_poly(f, table)).collect(),
            factored: rule.display_factored(table),
            support: rule.support,
            class_positive: rule.class_positive(),
            agree: rule.agree,
            exception_ids: rule.exception_ids.clone(),
            source: format_poly(&rule.provenance.source, table),
            cycle: rule.provenance.cycle,
            parent,
        }
    }

    /// `45(1)`: support and selected class-1 records.
    pub fn counts_label(&self) -> String {
        format!("{}({})", self.support, self.class_positive)
    }
}

/// Rules of every class-containing element of the basis of 𝓙, counted on
/// the original observations so excised records show up as exceptions,
/// followed by their generalizations.
pub fn final_report(state: &SessionState, context: &ReportContext) -> Result<Report, WorkflowError> {
    if state.phase() != Phase::Terminated {
        return Err(WorkflowError::WrongPhase {
            expected: Phase::Terminated,
            actual: state.phase(),
        });
    }
    let table = state.table();
    let original = state.original();
    let class = table.class_index();
    let basis = state.ideal_j().basis();

    let mut rules: Vec<Rule> = Vec::new();
    for g in basis.elements().iter().filter(|g| g.contains_var(class)) {
        let cycle = state.origin_cycle(g).unwrap_or(state.cycle());
        rules.extend(extract_rules(g, original)?.into_iter().map(|r| r.with_cycle(cycle)));
    }
    let rule_docs: Vec<RuleDoc> = rules
        .iter()
        .enumerate()
        .map(|(i, r)| RuleDoc::new(format!("R{}", i + 1), r, table, None))
        .collect();

    let mut seen: Vec<(Polarity, crate::boolring::BoolPoly)> =
        rules.iter().map(|r| (r.polarity, r.criterion.clone())).collect();
    let mut generalizations = Vec::new();
    for (rule, doc) in rules.iter().zip(&rule_docs) {
        for g in generalize(rule, original) {
            let key = (g.polarity, g.criterion.clone());
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let id = format!("G{}", generalizations.len() + 1);
            generalizations.push(RuleDoc::new(id, &g, table, Some(doc.id.clone())));
        }
    }

    let mut notes = Vec::new();
    if rule_docs.is_empty() {
        notes.push("no accepted insight mentions the class variable; there are no rules".to_string());
    }

    let active = state.active();
    Ok(Report {
        format: REPORT_FORMAT.to_string(),
        version: REPORT_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        variables: table.to_docs(),
        order: state.order().to_doc(table),
        thresholds: context.thresholds.as_ref().map(Thresholds::to_map),
        policy: context.policy,
        trace: state.trace().clone(),
        summary: ReportSummary {
            records: original.record_count(),
            class_positive: original.class_positive_count(),
            observed_patterns: original.observed_count(),
            unobserved_exponent: original.unobserved_count(),
            cycles: state.cycle(),
            active_records: active.record_count(),
            active_patterns: active.observed_count(),
            active_unobserved_exponent: active.unobserved_count(),
            excised: state
                .excised()
                .iter()
                .map(|e| ExcisionDoc {
                    record_id: e.record_id.clone(),
                    pattern: e.pattern.clone(),
                    cycle: e.cycle,
                })
                .collect(),
        },
        insight_basis: basis.elements().iter().map(|g| format_poly(g, table)).collect(),
        rules: rule_docs,
        generalizations,
        notes,
    })
}

impl Report {
    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let report: Report = serde_json::from_str(text)?;
        check_header(&report.format, report.version, REPORT_FORMAT, REPORT_VERSION)?;
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        crate::doc::to_json_string(self)
    }

    pub fn table(&self) -> Result<VariableTable, DocError> {
        Ok(VariableTable::from_docs(&self.variables)?)
    }

    pub fn to_markdown(&self) -> String {
        let class_name = self
            .variables
            .iter()
            .find(|v| v.class)
            .map_or("class", |v| v.name.as_str());
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(out, "# Rule report\n");
        let _ = writeln!(out, "Generated by {}.\n", self.tool_version);
        let _ = writeln!(out, "## Data\n");
        let codes: Vec<String> = self
            .variables
            .iter()
            .map(|v| format!("`{}` {}", v.code, v.name))
            .collect();
        let _ = writeln!(out, "- variables: {}", codes.join(", "));
        let _ = writeln!(out, "- order: {} ({})", self.order.kind, self.order.precedence);
        let _ = writeln!(out, "- records: {} ({} with {class_name})", s.records, s.class_positive);
        let _ = writeln!(
            out,
            "- observed patterns: {}; empty selection criteria: 2^{}",
            s.observed_patterns, s.unobserved_exponent
        );
        if let Some(th) = &self.thresholds {
            let cuts: Vec<String> = th.iter().map(|(k, v)| format!("{k} > {v}")).collect();
            let _ = writeln!(out, "- thresholds: {}", cuts.join(", "));
        }
        let _ = writeln!(out, "- cycles: {}", s.cycles);
        if s.excised.is_empty() {
            let _ = writeln!(out, "- exceptions: none");
        } else {
            let ex: Vec<String> = s
                .excised
                .iter()
                .map(|e| format!("{} (cycle {})", e.record_id, e.cycle))
                .collect();
            let _ = writeln!(out, "- exceptions: {}", ex.join(", "));
            let _ = writeln!(
                out,
                "- after excision: {} records, {} patterns, 2^{} empty selection criteria",
                s.active_records, s.active_patterns, s.active_unobserved_exponent
            );
        }

        let table = |out: &mut String, rows: &[RuleDoc], with_parent: bool| {
            if with_parent {
                let _ = writeln!(
                    out,
                    "| id | from | type | number ({class_name}) | selection criterion | exceptions |"
                );
                let _ = writeln!(out, "|---|---|---|---|---|---|");
            } else {
                let _ = writeln!(
                    out,
                    "| id | type | number ({class_name}) | selection criterion | exceptions |"
                );
                let _ = writeln!(out, "|---|---|---|---|---|");
            }
            for r in rows {
                let ex = if r.exception_ids.is_empty() {
                    "-".to_string()
                } else {
                    r.exception_ids.join(", ")
                };
                let parent = if with_parent {
                    format!(" {} |", r.parent.as_deref().unwrap_or("-"))
                } else {
                    String::new()
                };
                let _ = writeln!(
                    out,
                    "| {} |{} {} | {} | {} | {} |",
                    r.id,
                    parent,
                    r.polarity.short(),
                    r.counts_label(),
                    r.factored,
                    ex
                );
            }
        };

        let _ = writeln!(out, "\n## Rules\n");
        if self.rules.is_empty() {
            let _ = writeln!(out, "No rules.");
        } else {
            table(&mut out, &self.rules, false);
        }
        let _ = writeln!(out, "\n## Generalizations\n");
        if self.generalizations.is_empty() {
            let _ = writeln!(out, "None.");
        } else {
            table(&mut out, &self.generalizations, true);
        }

        let _ = writeln!(out, "\n## Decisions\n");
        for c in &self.trace.cycles {
            let _ = writeln!(out, "Cycle {}:", c.cycle);
            if c.insight_rounds.is_empty() {
                let _ = writeln!(out, "- insights: none");
            }
            for (i, round) in c.insight_rounds.iter().enumerate() {
                let _ = writeln!(out, "- insights, round {}: {}", i + 1, round.join("; "));
            }
            if c.exceptions.is_empty() {
                let _ = writeln!(out, "- exceptions: none");
            }
            for e in &c.exceptions {
                let _ = writeln!(
                    out,
                    "- exception: pattern {} (records {})",
                    e.pattern.as_deref().unwrap_or("?"),
                    e.record_ids.join(", ")
                );
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "\nNote: {n}");
        }
        out
    }
}
