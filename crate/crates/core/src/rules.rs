//! Positive and negative rules from class-containing polynomials.
//!
//! A polynomial `A s + B` (with `A`, `B` free of the class variable `s`) that
//! vanishes on every observed pattern forces `B = 0` on class-0 patterns and
//! `A = B` on class-1 patterns. So `B` selects only class-1 records
//! (a positive rule) and `A (1 + B)` selects only class-0 records
//! (a negative rule).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolring::{format_poly, BoolPoly, Monomial, VariableTable};
use crate::dataset::PatternTable;

/// Criteria with more variables than this are never searched for factors.
pub const MAX_FACTOR_VARIABLES: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("criterion mentions the class variable")]
    ClassInCriterion,
    #[error("polynomial does not contain the class variable")]
    NoClassVariable,
    #[error("cannot factor the zero polynomial")]
    ZeroPolynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn short(self) -> &'static str {
        match self {
            Polarity::Positive => "pos",
            Polarity::Negative => "neg",
        }
    }
}

/// Unique decomposition `p = A s + B` with `A`, `B` free of `s`.
pub fn split_on_class(p: &BoolPoly, class_index: usize) -> (BoolPoly, BoolPoly) {
    let (with, without): (Vec<Monomial>, Vec<Monomial>) = p.terms().iter().partition(|m| m.contains(class_index));
    (
        BoolPoly::from_monomials(with.into_iter().map(|m| m.without(class_index))),
        BoolPoly::from_monomials(without),
    )
}

/// Records selected by a criterion.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Selection {
    pub support: usize,
    pub class_positive: usize,
    pub positive_ids: Vec<String>,
    pub negative_ids: Vec<String>,
}

impl Selection {
    pub fn record_ids(&self) -> Vec<String> {
        let mut ids = self.positive_ids.clone();
        ids.extend(self.negative_ids.iter().cloned());
        ids
    }
}

pub fn count_selection(criterion: &BoolPoly, patterns: &PatternTable) -> Result<Selection, RuleError> {
    let table = patterns.table();
    if criterion.support() & table.class_mask() != 0 {
        return Err(RuleError::ClassInCriterion);
    }
    let mut sel = Selection::default();
    for p in patterns.patterns() {
        if !criterion.eval_bits(p.bits) {
            continue;
        }
        sel.support += p.multiplicity();
        if p.class(table) {
            sel.class_positive += p.multiplicity();
            sel.positive_ids.extend(p.record_ids.iter().cloned());
        } else {
            sel.negative_ids.extend(p.record_ids.iter().cloned());
        }
    }
    Ok(sel)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// The class-containing polynomial the rule was read from.
    pub source: BoolPoly,
    pub cycle: u32,
    /// Criterion of the rule this one generalizes.
    pub parent: Option<BoolPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub polarity: Polarity,
    pub criterion: BoolPoly,
    /// Disjoint-support factors whose product is `criterion`.
    pub factors: Vec<BoolPoly>,
    pub support: usize,
    /// Selected records whose class matches the rule's claim.
    pub agree: usize,
    /// Selected records whose class contradicts the claim.
    pub exception_ids: Vec<String>,
    pub provenance: Provenance,
}

impl Rule {
    fn build(
        polarity: Polarity,
        criterion: BoolPoly,
        factors: Vec<BoolPoly>,
        patterns: &PatternTable,
        provenance: Provenance,
    ) -> Result<Rule, RuleError> {
        let sel = count_selection(&criterion, patterns)?;
        let (agree, exception_ids) = match polarity {
            Polarity::Positive => (sel.class_positive, sel.negative_ids),
            Polarity::Negative => (sel.support - sel.class_positive, sel.positive_ids),
        };
        Ok(Rule {
            polarity,
            criterion,
            factors,
            support: sel.support,
            agree,
            exception_ids,
            provenance,
        })
    }

    /// Number of selected class-1 records, as in a `support(class_positive)` column.
    pub fn class_positive(&self) -> usize {
        match self.polarity {
            Polarity::Positive => self.agree,
            Polarity::Negative => self.exception_ids.len(),
        }
    }

    pub fn variable_count(&self) -> u32 {
        self.criterion.variable_count()
    }

    /// Factored rendering, e.g. `T (y + 1) (L + M)`.
    pub fn display_factored(&self, table: &VariableTable) -> String {
        format_factored(&self.factors, table)
    }

    /// `support(class_positive)`, e.g. `45(1)`.
    pub fn counts_label(&self) -> String {
        format!("{}({})", self.support, self.class_positive())
    }

    pub fn with_cycle(mut self, cycle: u32) -> Self {
        self.provenance.cycle = cycle;
        self
    }
}

pub fn format_factored(factors: &[BoolPoly], table: &VariableTable) -> String {
    factors
        .iter()
        .map(|f| {
            if f.len() == 1 || factors.len() == 1 {
                format_poly(f, table)
            } else {
                format!("({})", format_poly(f, table))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Positive rule `B` and negative rule `A (1 + B)` of `p = A s + B`;
/// candidates that select no record are dropped.
pub fn extract_rules(p: &BoolPoly, patterns: &PatternTable) -> Result<Vec<Rule>, RuleError> {
    let class = patterns.table().class_index();
    if !p.contains_var(class) {
        return Err(RuleError::NoClassVariable);
    }
    let (a, b) = split_on_class(p, class);
    let provenance = Provenance {
        source: p.clone(),
        cycle: 0,
        parent: None,
    };
    let negative = a.mul(&b.negate());
    let mut rules = Vec::new();
    for (polarity, criterion) in [(Polarity::Positive, b), (Polarity::Negative, negative)] {
        if criterion.is_zero() {
            continue;
        }
        let factors = factor_disjoint(&criterion)?;
        let rule = Rule::build(polarity, criterion, factors, patterns, provenance.clone())?;
        if rule.support > 0 {
            rules.push(rule);
        }
    }
    Ok(rules)
}

/// Splits `p` into factors with pairwise disjoint variable supports whose
/// product is `p`, refined as far as possible.
///
/// A bipartition `(V1, V2)` of the support splits `p` iff the monomials of
/// `p` are exactly all unions of their `V1`-parts and `V2`-parts. Factors are
/// ordered single variables first (table order), then by term count and
/// variable count.
pub fn factor_disjoint(p: &BoolPoly) -> Result<Vec<BoolPoly>, RuleError> {
    if p.is_zero() {
        return Err(RuleError::ZeroPolynomial);
    }
    let terms: Vec<u64> = p.terms().iter().map(|m| m.bits()).collect();
    let mut out = Vec::new();
    factor_rec(&terms, p.support(), &mut out);
    out.sort_by_key(|f| {
        let single_var = f.len() == 1 && f.terms()[0].degree() == 1;
        (
            !single_var,
            f.len(),
            f.variable_count(),
            f.support().trailing_zeros(),
            f.clone(),
        )
    });
    Ok(out)
}

fn project(terms: &[u64], mask: u64) -> Vec<u64> {
    let mut v: Vec<u64> = terms.iter().map(|t| t & mask).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn factor_rec(terms: &[u64], support: u64, out: &mut Vec<BoolPoly>) {
    let whole = || BoolPoly::from_monomials(terms.iter().map(|&t| Monomial::from_bits(t)));
    let n = support.count_ones();
    if n <= 1 || n > MAX_FACTOR_VARIABLES {
        out.push(whole());
        return;
    }
    let first = support & support.wrapping_neg();
    let rest = support & !first;
    // proper subsets of `rest`, fewest variables first
    let mut subsets: Vec<u64> = Vec::with_capacity(1 << (n - 1));
    let mut sub = 0u64;
    loop {
        if sub != rest {
            subsets.push(sub);
        }
        if sub == rest {
            break;
        }
        sub = sub.wrapping_sub(rest) & rest;
    }
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for s in subsets {
        let block = first | s;
        let left = project(terms, block);
        let right = project(terms, support & !block);
        if left.len() * right.len() == terms.len() {
            out.push(BoolPoly::from_monomials(left.into_iter().map(Monomial::from_bits)));
            factor_rec(&right, support & !block, out);
            return;
        }
    }
    out.push(whole());
}

/// Rules from every nonempty proper sub-product of `rule`'s factors, most
/// factors first; equal criteria are reported once.
pub fn generalize(rule: &Rule, patterns: &PatternTable) -> Vec<Rule> {
    let k = rule.factors.len();
    if k < 2 {
        return Vec::new();
    }
    let mut masks: Vec<u32> = (1..(1u32 << k) - 1).collect();
    masks.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    let mut out: Vec<Rule> = Vec::new();
    for mask in masks {
        let factors: Vec<BoolPoly> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| rule.factors[i].clone())
            .collect();
        let criterion = factors.iter().fold(BoolPoly::one(), |acc, f| acc.mul(f));
        if out.iter().any(|r| r.criterion == criterion) {
            continue;
        }
        let provenance = Provenance {
            source: rule.provenance.source.clone(),
            cycle: rule.provenance.cycle,
            parent: Some(rule.criterion.clone()),
        };
        if let Ok(r) = Rule::build(rule.polarity, criterion, factors, patterns, provenance) {
            out.push(r);
        }
    }
    out
}
