use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::report::{Report, RuleDoc};
use super::WorkflowError;
use crate::boolring::{parse_poly, BoolPoly};
use crate::dataset::{RecordTable, Thresholds};
use crate::rules::Polarity;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub rule: String,
    pub field: String,
    pub reported: String,
    pub recomputed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VerificationResult {
    pub rules_checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerificationResult {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recounts every rule of the report by evaluating its criterion on each
/// record's raw values against the cuts.
pub fn verify_rules(
    report: &Report,
    records: &RecordTable,
    cuts: &Thresholds,
) -> Result<VerificationResult, WorkflowError> {
    let table = records.table();
    if report.variables != table.to_docs() {
        return Err(WorkflowError::Mismatch("variables differ".into()));
    }
    let names = records.feature_names();
    if cuts.features().len() != names.len() || cuts.features().iter().zip(&names).any(|(a, b)| a != b) {
        return Err(WorkflowError::Mismatch("thresholds do not cover the features".into()));
    }
    // evaluated once, straight from the raw values
    let rows: Vec<(&str, u64, bool)> = records
        .records()
        .iter()
        .map(|r| {
            let mut bits = 0u64;
            for (i, (&v, &c)) in r.values.iter().zip(cuts.cuts()).enumerate() {
                if v > c {
                    bits |= 1 << i;
                }
            }
            (r.id.as_str(), bits, r.class)
        })
        .collect();

    let mut result = VerificationResult::default();
    for rule in report.rules.iter().chain(&report.generalizations) {
        result.rules_checked += 1;
        let mut miss = |field: &str, reported: String, recomputed: String| {
            if reported != recomputed {
                result.mismatches.push(Mismatch {
                    rule: rule.id.clone(),
                    field: field.to_string(),
                    reported,
                    recomputed,
                });
            }
        };
        let criterion = parse_poly(&rule.criterion, table)?;
        if criterion.support() & table.class_mask() != 0 {
            miss(
                "criterion",
                rule.criterion.clone(),
                "mentions the class variable".into(),
            );
            continue;
        }
        let product = rule
            .factors
            .iter()
            .map(|f| parse_poly(f, table))
            .try_fold(BoolPoly::one(), |acc, f| f.map(|f| acc.mul(&f)))?;
        miss(
            "factors",
            rule.criterion.clone(),
            crate::boolring::format_poly(&product, table),
        );

        let (support, class_positive, exceptions) = recount(rule, &criterion, &rows);
        miss("support", rule.support.to_string(), support.to_string());
        miss(
            "class_positive",
            rule.class_positive.to_string(),
            class_positive.to_string(),
        );
        miss(
            "agree",
            rule.agree.to_string(),
            (support - exceptions.len()).to_string(),
        );
        let reported: BTreeSet<&str> = rule.exception_ids.iter().map(String::as_str).collect();
        let join = |s: &BTreeSet<&str>| s.iter().copied().collect::<Vec<_>>().join(",");
        miss("exception_ids", join(&reported), join(&exceptions));
    }
    Ok(result)
}

fn recount<'a>(
    rule: &RuleDoc,
    criterion: &BoolPoly,
    rows: &[(&'a str, u64, bool)],
) -> (usize, usize, BTreeSet<&'a str>) {
    let mut support = 0;
    let mut positive = 0;
    let mut exceptions = BTreeSet::new();
    for &(id, bits, class) in rows {
        if !criterion.eval_bits(bits) {
            continue;
        }
        support += 1;
        if class {
            positive += 1;
        }
        let agrees = match rule.polarity {
            Polarity::Positive => class,
            Polarity::Negative => !class,
        };
        if !agrees {
            exceptions.insert(id);
        }
    }
    (support, positive, exceptions)
}
