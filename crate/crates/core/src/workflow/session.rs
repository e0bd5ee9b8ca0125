use std::cmp::Reverse;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::trace::{DecisionTrace, ExceptionDecision};
use super::WorkflowError;
use crate::boolring::{format_poly, BoolPoly, MonomialOrder, VariableTable};
use crate::dataset::{pattern_key, PatternTable};
use crate::ideals::{ideal_from_patterns, Ideal};
use crate::rules::{extract_rules, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Insight,
    Exception,
    Terminated,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Insight => "insight",
            Phase::Exception => "exception",
            Phase::Terminated => "terminated",
        })
    }
}

/// A class-containing basis element of 𝓘 that is not yet in 𝓙.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsightCandidate {
    pub source: BoolPoly,
    /// Normal form of `source` modulo the basis of 𝓙.
    pub remainder: BoolPoly,
    /// Rules of the remainder, counted on the active patterns.
    pub rules: Vec<Rule>,
}

impl InsightCandidate {
    pub fn max_support(&self) -> usize {
        self.rules.iter().map(|r| r.support).max().unwrap_or(0)
    }

    /// Feature variables of the remainder.
    pub fn variable_count(&self, table: &VariableTable) -> u32 {
        (self.remainder.support() & table.feature_mask()).count_ones()
    }

    pub fn id(&self, table: &VariableTable) -> String {
        format_poly(&self.source, table)
    }

    pub fn matches(&self, p: &BoolPoly) -> bool {
        &self.source == p || &self.remainder == p
    }
}

/// An active pattern whose indicator has a nonzero remainder modulo 𝓘.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionCandidate {
    pub key: String,
    pub bits: u64,
    pub remainder: BoolPoly,
    pub record_ids: Vec<String>,
}

impl ExceptionCandidate {
    pub fn multiplicity(&self) -> usize {
        self.record_ids.len()
    }

    /// Feature variables of the remainder.
    pub fn variable_count(&self, table: &VariableTable) -> u32 {
        (self.remainder.support() & table.feature_mask()).count_ones()
    }
}

/// A record taken out of the active observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excision {
    pub record_id: String,
    pub pattern: String,
    pub cycle: u32,
}

/// Workflow state as a persistent value: every decision returns a new state
/// and leaves the old one usable.
#[derive(Debug, Clone)]
pub struct SessionState {
    original: Arc<PatternTable>,
    active: Arc<PatternTable>,
    cycle: u32,
    phase: Phase,
    i: Ideal,
    j: Ideal,
    insights: Arc<Vec<InsightCandidate>>,
    exceptions: Arc<Vec<ExceptionCandidate>>,
    log: DecisionTrace,
    excised: Arc<Vec<Excision>>,
    /// Basis elements of 𝓙 with the cycle in which each first appeared.
    j_origin: Arc<Vec<(BoolPoly, u32)>>,
}

pub fn start_session(patterns: PatternTable, order: &MonomialOrder) -> Result<SessionState, WorkflowError> {
    if patterns.is_empty() {
        return Err(WorkflowError::EmptyPatterns);
    }
    order.check_table(patterns.table())?;
    let i = ideal_from_patterns(&patterns, order);
    let patterns = Arc::new(patterns);
    let mut log = DecisionTrace::new();
    log.current_mut(1);
    let mut state = SessionState {
        original: patterns.clone(),
        active: patterns,
        cycle: 1,
        phase: Phase::Insight,
        i,
        j: Ideal::new("J", Vec::new(), order.clone()),
        insights: Arc::new(Vec::new()),
        exceptions: Arc::new(Vec::new()),
        log,
        excised: Arc::new(Vec::new()),
        j_origin: Arc::new(Vec::new()),
    };
    state.refresh_insights()?;
    Ok(state)
}

impl SessionState {
    pub fn table(&self) -> &VariableTable {
        self.original.table()
    }

    pub fn order(&self) -> &MonomialOrder {
        self.i.order()
    }

    pub fn cycle(&self) -> u32 {
        self.cycle
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Insight rounds accepted so far in the current cycle.
    pub fn round(&self) -> usize {
        self.log.cycle(self.cycle).map_or(0, |c| c.insight_rounds.len())
    }

    pub fn original(&self) -> &PatternTable {
        &self.original
    }

    /// Observations with excised records removed.
    pub fn active(&self) -> &PatternTable {
        &self.active
    }

    pub fn ideal_i(&self) -> &Ideal {
        &self.i
    }

    pub fn ideal_j(&self) -> &Ideal {
        &self.j
    }

    pub fn excised(&self) -> &[Excision] {
        &self.excised
    }

    /// Decisions so far, including the current cycle.
    pub fn trace(&self) -> &DecisionTrace {
        &self.log
    }

    /// Cycle in which a basis element of 𝓙 first appeared.
    pub fn origin_cycle(&self, element: &BoolPoly) -> Option<u32> {
        self.j_origin.iter().find(|(p, _)| p == element).map(|(_, c)| *c)
    }

    fn expect(&self, phase: Phase) -> Result<(), WorkflowError> {
        if self.phase != phase {
            return Err(WorkflowError::WrongPhase {
                expected: phase,
                actual: self.phase,
            });
        }
        Ok(())
    }

    pub fn insight_candidates(&self) -> Result<&[InsightCandidate], WorkflowError> {
        self.expect(Phase::Insight)?;
        Ok(&self.insights)
    }

    pub fn exception_candidates(&self) -> Result<&[ExceptionCandidate], WorkflowError> {
        self.expect(Phase::Exception)?;
        Ok(&self.exceptions)
    }

    /// Extends 𝓙 by the sources of the accepted candidates (each given as
    /// its source or its remainder). Accepting nothing ends the inner loop.
    pub fn decide_insights(&self, accepted: &[BoolPoly]) -> Result<SessionState, WorkflowError> {
        self.expect(Phase::Insight)?;
        let mut sources: Vec<BoolPoly> = Vec::new();
        for p in accepted {
            let c = self
                .insights
                .iter()
                .find(|c| c.matches(p))
                .ok_or_else(|| WorkflowError::NotACandidate {
                    cycle: self.cycle,
                    phase: Phase::Insight,
                    item: format_poly(p, self.table()),
                })?;
            if !sources.contains(&c.source) {
                sources.push(c.source.clone());
            }
        }
        let mut next = self.clone();
        if sources.is_empty() {
            next.phase = Phase::Exception;
            next.exceptions = Arc::new(next.compute_exceptions());
            return Ok(next);
        }
        debug_assert!(sources.iter().all(|s| self.i.contains(s)), "𝓙 must stay inside 𝓘");
        let table = self.table().clone();
        next.log
            .current_mut(self.cycle)
            .insight_rounds
            .push(sources.iter().map(|s| format_poly(s, &table)).collect());
        next.j = self.j.extend(&sources);
        let mut origin = (*self.j_origin).clone();
        for g in next.j.basis().elements() {
            if !origin.iter().any(|(p, _)| p == g) {
                origin.push((g.clone(), self.cycle));
            }
        }
        next.j_origin = Arc::new(origin);
        next.refresh_insights()?;
        Ok(next)
    }

    /// Excises the accepted records. Patterns left without records leave the
    /// observed set: their remainders join the generators of 𝓘. Accepting
    /// nothing terminates the session.
    pub fn decide_exceptions(&self, accepted: &[ExceptionDecision]) -> Result<SessionState, WorkflowError> {
        self.expect(Phase::Exception)?;
        let not_candidate = |item: String| WorkflowError::NotACandidate {
            cycle: self.cycle,
            phase: Phase::Exception,
            item,
        };
        // candidate index -> records to excise, in decision order
        let mut picks: Vec<(usize, Vec<String>)> = Vec::new();
        let mut add = |idx: usize, id: &str| match picks.iter_mut().find(|(i, _)| *i == idx) {
            Some((_, ids)) => {
                if !ids.iter().any(|x| x == id) {
                    ids.push(id.to_string());
                }
            }
            None => picks.push((idx, vec![id.to_string()])),
        };
        for d in accepted {
            match &d.pattern {
                Some(key) => {
                    let idx = self
                        .exceptions
                        .iter()
                        .position(|c| &c.key == key)
                        .ok_or_else(|| not_candidate(format!("pattern {key}")))?;
                    let c = &self.exceptions[idx];
                    let ids = if d.record_ids.is_empty() {
                        &c.record_ids
                    } else {
                        &d.record_ids
                    };
                    for id in ids {
                        if !c.record_ids.contains(id) {
                            return Err(not_candidate(format!("record {id} of pattern {key}")));
                        }
                        add(idx, id);
                    }
                }
                None => {
                    for id in &d.record_ids {
                        let idx = self
                            .exceptions
                            .iter()
                            .position(|c| c.record_ids.contains(id))
                            .ok_or_else(|| not_candidate(format!("record {id}")))?;
                        add(idx, id);
                    }
                }
            }
        }

        let mut next = self.clone();
        if picks.is_empty() {
            next.phase = Phase::Terminated;
            next.exceptions = Arc::new(Vec::new());
            return Ok(next);
        }
        let mut removed: Vec<String> = Vec::new();
        let mut new_generators: Vec<BoolPoly> = Vec::new();
        let mut excised = (*self.excised).clone();
        let entries = &mut next.log.current_mut(self.cycle).exceptions;
        for (idx, ids) in &picks {
            let c = &self.exceptions[*idx];
            if ids.len() == c.record_ids.len() {
                new_generators.push(c.remainder.clone());
            }
            for id in ids {
                excised.push(Excision {
                    record_id: id.clone(),
                    pattern: c.key.clone(),
                    cycle: self.cycle,
                });
            }
            removed.extend(ids.iter().cloned());
            entries.push(ExceptionDecision {
                pattern: Some(c.key.clone()),
                record_ids: ids.clone(),
            });
        }
        next.active = Arc::new(self.active.without_records(&removed));
        if !new_generators.is_empty() {
            next.i = self.i.extend(&new_generators);
        }
        next.excised = Arc::new(excised);
        next.cycle += 1;
        next.log.current_mut(next.cycle);
        next.phase = Phase::Insight;
        next.exceptions = Arc::new(Vec::new());
        next.refresh_insights()?;
        Ok(next)
    }

    fn refresh_insights(&mut self) -> Result<(), WorkflowError> {
        let class = self.table().class_index();
        let sources: Vec<BoolPoly> = self
            .i
            .basis()
            .elements()
            .iter()
            .filter(|g| g.contains_var(class))
            .cloned()
            .collect();
        let remainders = self.j.remainders(&sources);
        let mut out = Vec::new();
        for (source, remainder) in sources.into_iter().zip(remainders) {
            if remainder.is_zero() || !remainder.contains_var(class) {
                continue;
            }
            let rules: Vec<Rule> = extract_rules(&remainder, &self.active)?
                .into_iter()
                .map(|r| r.with_cycle(self.cycle))
                .collect();
            if rules.is_empty() {
                continue;
            }
            out.push(InsightCandidate {
                source,
                remainder,
                rules,
            });
        }
        let table = self.table().clone();
        out.sort_by(|a, b| {
            (Reverse(a.max_support()), a.variable_count(&table), &a.source).cmp(&(
                Reverse(b.max_support()),
                b.variable_count(&table),
                &b.source,
            ))
        });
        self.insights = Arc::new(out);
        Ok(())
    }

    fn compute_exceptions(&self) -> Vec<ExceptionCandidate> {
        let table = self.table();
        let basis = self.i.basis();
        let mut out: Vec<ExceptionCandidate> = self
            .active
            .patterns()
            .iter()
            .filter_map(|p| {
                let factors: Vec<BoolPoly> = (0..table.len())
                    .map(|v| {
                        let x = BoolPoly::var(v);
                        if p.bits >> v & 1 == 1 {
                            x
                        } else {
                            x.negate()
                        }
                    })
                    .collect();
                let remainder = basis.normal_form_of_product(&factors);
                (!remainder.is_zero()).then(|| ExceptionCandidate {
                    key: pattern_key(p.bits, table),
                    bits: p.bits,
                    remainder,
                    record_ids: p.record_ids.clone(),
                })
            })
            .collect();
        out.sort_by(|a, b| {
            (a.remainder.len(), a.multiplicity(), &a.key).cmp(&(b.remainder.len(), b.multiplicity(), &b.key))
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolring::parse_poly;
    use crate::dataset::{pattern_indicator, Pattern};
    use crate::rules::Polarity;

    fn table() -> VariableTable {
        VariableTable::from_codes(&[("a", 'A'), ("b", 'B')], ("s", 's')).unwrap()
    }

    // bit 0 = A, bit 1 = B, bit 2 = s; class = A and not B, plus r9 off-rule
    fn planted(with_exception: bool) -> PatternTable {
        let mut pats = vec![
            Pattern {
                bits: 0b101,
                record_ids: vec!["r1".into(), "r2".into()],
            },
            Pattern {
                bits: 0b011,
                record_ids: vec!["r3".into()],
            },
            Pattern {
                bits: 0b010,
                record_ids: vec!["r4".into(), "r5".into()],
            },
            Pattern {
                bits: 0b000,
                record_ids: vec!["r6".into()],
            },
        ];
        if with_exception {
            pats.push(Pattern {
                bits: 0b111,
                record_ids: vec!["r9".into()],
            });
        }
        PatternTable::new(table(), pats).unwrap()
    }

    fn p(s: &str) -> BoolPoly {
        parse_poly(s, &table()).unwrap()
    }

    #[test]
    fn fresh_session() {
        let t = table();
        let s = start_session(planted(false), &MonomialOrder::default_for(&t)).unwrap();
        assert_eq!((s.cycle(), s.phase(), s.round()), (1, Phase::Insight, 0));
        assert!(s.ideal_j().generators().is_empty());
        // 𝓙 = 0: remainders are the basis elements themselves
        for c in s.insight_candidates().unwrap() {
            assert_eq!(c.source, c.remainder);
        }
        assert!(matches!(
            s.exception_candidates(),
            Err(WorkflowError::WrongPhase { .. })
        ));
        assert!(matches!(
            start_session(PatternTable::empty(t.clone()), &MonomialOrder::default_for(&t)),
            Err(WorkflowError::EmptyPatterns)
        ));
    }

    #[test]
    fn planted_rule_is_a_candidate() {
        let t = table();
        let s = start_session(planted(false), &MonomialOrder::default_for(&t)).unwrap();
        let cands = s.insight_candidates().unwrap();
        let planted = p("A(B+1)");
        assert!(cands
            .iter()
            .flat_map(|c| &c.rules)
            .any(|r| r.polarity == Polarity::Positive && r.criterion == planted));
        for w in cands.windows(2) {
            assert!(w[0].max_support() >= w[1].max_support());
        }
    }

    #[test]
    fn accepting_everything_empties_the_list() {
        let t = table();
        let s = start_session(planted(false), &MonomialOrder::default_for(&t)).unwrap();
        let all: Vec<BoolPoly> = s
            .insight_candidates()
            .unwrap()
            .iter()
            .map(|c| c.source.clone())
            .collect();
        let s2 = s.decide_insights(&all).unwrap();
        assert!(s2.insight_candidates().unwrap().is_empty());
        assert_eq!(s2.round(), 1);
        // the old state is untouched
        assert_eq!(s.insight_candidates().unwrap().len(), all.len());
        let s3 = s2.decide_insights(&[]).unwrap();
        assert_eq!(s3.phase(), Phase::Exception);
        assert_eq!(s3.ideal_j().generators().len(), all.len());
    }

    #[test]
    fn rejecting_unknown_insights() {
        let t = table();
        let s = start_session(planted(false), &MonomialOrder::default_for(&t)).unwrap();
        let err = s.decide_insights(&[p("AB + 1")]).unwrap_err();
        assert!(matches!(
            err,
            WorkflowError::NotACandidate {
                cycle: 1,
                phase: Phase::Insight,
                ..
            }
        ));
    }

    #[test]
    fn exception_excises_the_pattern() {
        let t = table();
        let s = start_session(planted(true), &MonomialOrder::default_for(&t))
            .unwrap()
            .decide_insights(&[])
            .unwrap();
        let cands = s.exception_candidates().unwrap();
        // every active pattern is presented; the indicator is never in 𝓘
        assert_eq!(cands.len(), 5);
        let chi = pattern_indicator(0b111, &t);
        assert!(!s.ideal_i().contains(&chi));
        let s2 = s.decide_exceptions(&[ExceptionDecision::records(&["r9"])]).unwrap();
        assert_eq!((s2.cycle(), s2.phase()), (2, Phase::Insight));
        assert!(s2.ideal_i().contains(&chi));
        assert_eq!(s2.active().record_count(), 6);
        assert_eq!(s2.excised()[0].record_id, "r9");
        assert_eq!(s2.trace().cycles[0].exceptions[0].pattern.as_deref(), Some("111"));
        assert_eq!(s2.trace().cycles.len(), 2);

        let err = s
            .decide_exceptions(&[ExceptionDecision::records(&["nobody"])])
            .unwrap_err();
        assert!(matches!(
            err,
            WorkflowError::NotACandidate {
                phase: Phase::Exception,
                ..
            }
        ));
        let done = s.decide_exceptions(&[]).unwrap();
        assert_eq!(done.phase(), Phase::Terminated);
    }

    #[test]
    fn partial_excision_keeps_the_pattern() {
        let t = table();
        let s = start_session(planted(false), &MonomialOrder::default_for(&t))
            .unwrap()
            .decide_insights(&[])
            .unwrap();
        let d = ExceptionDecision {
            pattern: Some("101".into()),
            record_ids: vec!["r1".into()],
        };
        let s2 = s.decide_exceptions(&[d]).unwrap();
        assert_eq!(s2.ideal_i().generators().len(), 1);
        assert_eq!(s2.active().find(0b101).unwrap().record_ids, ["r2"]);
    }
}
