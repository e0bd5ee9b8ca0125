//! Brute-force oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use lad_core::boolring::{BoolPoly, Monomial, VariableTable};
use lad_core::dataset::{Pattern, PatternTable, Record, RecordTable, Thresholds};
use rand::Rng;

/// Table with features `A`, `B`, ... and class `s`.
pub fn letters(features: usize) -> VariableTable {
    let codes: Vec<char> = ('A'..='Z').take(features).collect();
    let names: Vec<String> = codes.iter().map(|c| c.to_ascii_lowercase().to_string()).collect();
    let feats: Vec<(&str, char)> = names.iter().map(String::as_str).zip(codes.iter().copied()).collect();
    VariableTable::from_codes(&feats, ("class", 's')).unwrap()
}

/// Value of a polynomial given as raw monomial masks, by definition.
pub fn eval_terms(terms: &[u64], x: u64) -> bool {
    terms.iter().filter(|&&m| m & !x == 0).count() % 2 == 1
}

pub fn values(p: &BoolPoly, n: usize) -> Vec<bool> {
    let terms: Vec<u64> = p.terms().iter().map(|m| m.bits()).collect();
    (0..1u64 << n).map(|x| eval_terms(&terms, x)).collect()
}

/// Coefficient of `m` is the parity of `f` over the subsets of `m`.
pub fn anf_naive(f: &[bool], n: usize) -> BoolPoly {
    let mut terms = Vec::new();
    for m in 0..1u64 << n {
        let mut parity = false;
        let mut sub = m;
        loop {
            parity ^= f[sub as usize];
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & m;
        }
        if parity {
            terms.push(Monomial::from_bits(m));
        }
    }
    BoolPoly::from_monomials(terms)
}

pub fn poly(masks: &[u64]) -> BoolPoly {
    BoolPoly::from_monomials(masks.iter().map(|&m| Monomial::from_bits(m)))
}

pub fn random_poly<R: Rng>(rng: &mut R, n: usize, max_terms: usize) -> BoolPoly {
    let k = rng.gen_range(0..=max_terms);
    poly(&(0..k).map(|_| rng.gen_range(0..1u64 << n)).collect::<Vec<_>>())
}

pub fn vanishes_on(p: &BoolPoly, points: &[u64]) -> bool {
    let terms: Vec<u64> = p.terms().iter().map(|m| m.bits()).collect();
    points.iter().all(|&x| !eval_terms(&terms, x))
}

pub fn pattern_table(table: &VariableTable, points: &[u64]) -> PatternTable {
    let pats = points
        .iter()
        .map(|&b| Pattern {
            bits: b,
            record_ids: vec![format!("p{b}")],
        })
        .collect();
    PatternTable::new(table.clone(), pats).unwrap()
}

/// Features `A`..`D`; class is `A and not B`. Record `i` gets feature
/// combination `i mod 16`, so every combination is seen at least
/// `records / 16` times. Values are 0/1 plus noise below the 0.5 cut.
/// With `off_rule`, one extra record `x1` has A = B = 1 and class 1.
pub fn planted_records<R: Rng>(rng: &mut R, records: usize, off_rule: bool) -> (RecordTable, Thresholds) {
    let table = letters(4);
    let mut rows = Vec::new();
    let mut push = |id: String, combo: u64, class: bool, rng: &mut R| {
        let values = (0..4)
            .map(|i| if combo >> i & 1 == 1 { 1.0 } else { 0.0 } + rng.gen_range(0.0..0.4))
            .collect();
        rows.push(Record { id, values, class });
    };
    for i in 0..records {
        let combo = (i % 16) as u64;
        let class = combo & 1 == 1 && combo & 2 == 0;
        push(format!("r{i}"), combo, class, rng);
    }
    if off_rule {
        push("x1".to_string(), 0b0011, true, rng);
    }
    let names = ["a", "b", "c", "d"].map(String::from).to_vec();
    (
        RecordTable::new(table, rows).unwrap(),
        Thresholds::new(names, vec![0.5; 4]).unwrap(),
    )
}
