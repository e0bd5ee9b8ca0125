use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{DatasetError, RecordTable, Thresholds};
use crate::boolring::{BoolPoly, Monomial, VariableDoc, VariableTable};
use crate::doc::{check_header, DocError};

/// One distinct `{0,1}` assignment to all variables (features and class)
/// and the records that show it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub bits: u64,
    pub record_ids: Vec<String>,
}

impl Pattern {
    pub fn multiplicity(&self) -> usize {
        self.record_ids.len()
    }

    pub fn class(&self, table: &VariableTable) -> bool {
        self.bits & table.class_mask() != 0
    }
}

/// Renders pattern bits as a `0`/`1` string in table order; this is the
/// pattern key used in documents and decisions.
pub fn pattern_key(bits: u64, table: &VariableTable) -> String {
    (0..table.len())
        .map(|i| if bits & (1u64 << i) != 0 { '1' } else { '0' })
        .collect()
}

pub fn parse_pattern_key(key: &str, table: &VariableTable) -> Result<u64, DatasetError> {
    if key.chars().count() != table.len() {
        return Err(DatasetError::BadPatternKey(key.to_string()));
    }
    key.chars().enumerate().try_fold(0u64, |acc, (i, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | (1u64 << i)),
        _ => Err(DatasetError::BadPatternKey(key.to_string())),
    })
}

/// Distinct observed patterns with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTable {
    table: VariableTable,
    patterns: Vec<Pattern>,
}

impl PatternTable {
    /// Merges patterns with equal bits and sorts them by key. Empty patterns
    /// are dropped; a record id may appear only once.
    pub fn new(table: VariableTable, patterns: Vec<Pattern>) -> Result<Self, DatasetError> {
        let mut merged: BTreeMap<String, Pattern> = BTreeMap::new();
        let mut seen = HashSet::new();
        let full = table.full_mask();
        for p in patterns {
            if p.bits & !full != 0 {
                return Err(DatasetError::BadPatternKey(format!("{:#x}", p.bits)));
            }
            for id in &p.record_ids {
                if !seen.insert(id.clone()) {
                    return Err(DatasetError::DuplicateId {
                        line: 0,
                        id: id.clone(),
                    });
                }
            }
            if p.record_ids.is_empty() {
                continue;
            }
            merged
                .entry(pattern_key(p.bits, &table))
                .and_modify(|q| q.record_ids.extend(p.record_ids.iter().cloned()))
                .or_insert(p);
        }
        Ok(Self {
            table,
            patterns: merged.into_values().collect(),
        })
    }

    pub fn empty(table: VariableTable) -> Self {
        Self {
            table,
            patterns: Vec::new(),
        }
    }

    pub fn table(&self) -> &VariableTable {
        &self.table
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn observed_count(&self) -> usize {
        self.patterns.len()
    }

    /// Number of assignments never observed: `2^n - observed`.
    pub fn unobserved_count(&self) -> u128 {
        (1u128 << self.table.len()) - self.patterns.len() as u128
    }

    pub fn record_count(&self) -> usize {
        self.patterns.iter().map(Pattern::multiplicity).sum()
    }

    pub fn class_positive_count(&self) -> usize {
        self.patterns
            .iter()
            .filter(|p| p.class(&self.table))
            .map(Pattern::multiplicity)
            .sum()
    }

    pub fn class_negative_count(&self) -> usize {
        self.record_count() - self.class_positive_count()
    }

    pub fn key(&self, p: &Pattern) -> String {
        pattern_key(p.bits, &self.table)
    }

    pub fn find(&self, bits: u64) -> Option<&Pattern> {
        self.patterns.iter().find(|p| p.bits == bits)
    }

    pub fn find_key(&self, key: &str) -> Option<&Pattern> {
        let bits = parse_pattern_key(key, &self.table).ok()?;
        self.find(bits)
    }

    pub fn pattern_of_record(&self, id: &str) -> Option<&Pattern> {
        self.patterns.iter().find(|p| p.record_ids.iter().any(|r| r == id))
    }

    /// A copy without the given records; patterns left with no records
    /// leave the observed set.
    pub fn without_records(&self, ids: &[String]) -> Self {
        let drop: HashSet<&str> = ids.iter().map(String::as_str).collect();
        let patterns = self
            .patterns
            .iter()
            .filter_map(|p| {
                let kept: Vec<String> = p
                    .record_ids
                    .iter()
                    .filter(|r| !drop.contains(r.as_str()))
                    .cloned()
                    .collect();
                (!kept.is_empty()).then_some(Pattern {
                    bits: p.bits,
                    record_ids: kept,
                })
            })
            .collect();
        Self {
            table: self.table.clone(),
            patterns,
        }
    }

    pub fn to_doc(&self) -> PatternsDoc {
        PatternsDoc {
            format: PATTERNS_FORMAT.to_string(),
            version: PATTERNS_VERSION,
            variables: self.table.to_docs(),
            patterns: self
                .patterns
                .iter()
                .map(|p| PatternEntry {
                    bits: self.key(p),
                    multiplicity: p.multiplicity(),
                    record_ids: p.record_ids.clone(),
                })
                .collect(),
        }
    }
}

/// Maps each record to its bits (`value > cut` is 1) and merges equal rows.
pub fn binarize(records: &RecordTable, cuts: &Thresholds) -> Result<PatternTable, DatasetError> {
    let table = records.table().clone();
    let names = records.feature_names();
    if cuts.features().len() != names.len() || cuts.features().iter().zip(&names).any(|(a, b)| a != b) {
        return Err(DatasetError::Config(
            "thresholds do not match the record features".into(),
        ));
    }
    let patterns = records
        .records()
        .iter()
        .map(|r| Pattern {
            bits: record_bits(&r.values, r.class, cuts.cuts(), &table),
            record_ids: vec![r.id.clone()],
        })
        .collect();
    PatternTable::new(table, patterns)
}

pub(crate) fn record_bits(values: &[f64], class: bool, cuts: &[f64], table: &VariableTable) -> u64 {
    let mut bits = values
        .iter()
        .zip(cuts)
        .enumerate()
        .filter(|(_, (v, c))| v > c)
        .fold(0u64, |acc, (i, _)| acc | (1u64 << i));
    if class {
        bits |= table.class_mask();
    }
    bits
}

/// The product over all variables of `v` (bit 1) or `v + 1` (bit 0): the
/// polynomial that is 1 exactly on this assignment. Has `2^zeros` terms.
pub fn pattern_indicator(bits: u64, table: &VariableTable) -> BoolPoly {
    let full = table.full_mask();
    let ones = bits & full;
    let zeros = !bits & full;
    let mut terms = Vec::with_capacity(1usize << zeros.count_ones());
    let mut sub = 0u64;
    loop {
        terms.push(Monomial::from_bits(ones | sub));
        if sub == zeros {
            break;
        }
        sub = (sub.wrapping_sub(zeros)) & zeros;
    }
    BoolPoly::from_monomials(terms)
}

/// `1 + sum of indicators of the observed patterns`: 1 exactly on the
/// unobserved assignments.
pub fn build_sigma(patterns: &PatternTable) -> BoolPoly {
    let table = patterns.table();
    let mut terms: Vec<Monomial> = vec![Monomial::ONE];
    for p in patterns.patterns() {
        terms.extend_from_slice(pattern_indicator(p.bits, table).terms());
    }
    BoolPoly::from_monomials(terms)
}

/// Exponent `u` of the number `2^u` of criteria that select no observed
/// pattern (one per subset of unobserved assignments).
pub fn count_empty_criteria(patterns: &PatternTable) -> u128 {
    patterns.unobserved_count()
}

pub const PATTERNS_FORMAT: &str = "lad-patterns";
pub const PATTERNS_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternEntry {
    pub bits: String,
    pub multiplicity: usize,
    pub record_ids: Vec<String>,
}

/// Versioned patterns file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternsDoc {
    pub format: String,
    pub version: u32,
    pub variables: Vec<VariableDoc>,
    pub patterns: Vec<PatternEntry>,
}

impl PatternsDoc {
    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let doc: PatternsDoc = serde_json::from_str(text)?;
        check_header(&doc.format, doc.version, PATTERNS_FORMAT, PATTERNS_VERSION)?;
        Ok(doc)
    }

    pub fn to_table(&self) -> Result<PatternTable, DocError> {
        let table = VariableTable::from_docs(&self.variables)?;
        let mut patterns = Vec::with_capacity(self.patterns.len());
        for e in &self.patterns {
            if e.multiplicity != e.record_ids.len() {
                return Err(DocError::Invalid(format!(
                    "pattern {} has multiplicity {} but {} record ids",
                    e.bits,
                    e.multiplicity,
                    e.record_ids.len()
                )));
            }
            let bits = parse_pattern_key(&e.bits, &table).map_err(|e| DocError::Invalid(e.to_string()))?;
            patterns.push(Pattern {
                bits,
                record_ids: e.record_ids.clone(),
            });
        }
        PatternTable::new(table, patterns).map_err(|e| DocError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolring::{parse_poly, Assignment};
    use crate::dataset::Record;

    fn sepsis_table() -> VariableTable {
        VariableTable::from_codes(
            &[
                ("ENA-78", 'E'),
                ("Fractalkine", 'F'),
                ("GLP-1", 'G'),
                ("Leptin", 'L'),
                ("MMP-8", 'M'),
                ("MyD88", 'y'),
                ("PD-L1", 'P'),
                ("Pentraxin-3", 'x'),
                ("TRAIL", 'T'),
            ],
            ("sepsis", 's'),
        )
        .unwrap()
    }

    fn table1_cuts(t: &VariableTable) -> Thresholds {
        let names = t.features().iter().map(|v| v.name.clone()).collect();
        Thresholds::new(
            names,
            vec![
                786.51, 17307.21, 22.71, 20818.6, 59704.08, 51.88, 844.84, 28200.36, 92.8,
            ],
        )
        .unwrap()
    }

    #[test]
    fn patient_135_pattern() {
        let t = sepsis_table();
        let records = RecordTable::new(
            t.clone(),
            vec![Record {
                id: "135".into(),
                values: vec![1877.0, 90658.0, 22.0, 561.0, 60876.0, 81.0, 479.0, 52470.0, 408.0],
                class: true,
            }],
        )
        .unwrap();
        let pt = binarize(&records, &table1_cuts(&t)).unwrap();
        assert_eq!(pt.patterns().len(), 1);
        assert_eq!(pt.key(&pt.patterns()[0]), "1100110111");

        let ind = pattern_indicator(pt.patterns()[0].bits, &t);
        assert_eq!(ind.len(), 8);
        assert_eq!(ind, parse_poly("E F (G+1) (L+1) M y (P+1) x T s", &t).unwrap());
    }

    #[test]
    fn identical_rows_merge() {
        let t = VariableTable::from_codes(&[("a", 'A')], ("s", 's')).unwrap();
        let rec = |id: &str, v: f64| Record {
            id: id.into(),
            values: vec![v],
            class: false,
        };
        let records = RecordTable::new(t.clone(), vec![rec("1", 3.0), rec("2", 3.0), rec("3", 0.0)]).unwrap();
        let cuts = Thresholds::new(vec!["a".into()], vec![1.0]).unwrap();
        let pt = binarize(&records, &cuts).unwrap();
        assert_eq!(pt.observed_count(), 2);
        let high = pt.find_key("10").unwrap();
        assert_eq!(high.multiplicity(), 2);
        assert_eq!(high.record_ids, vec!["1", "2"]);
        assert_eq!(pt.unobserved_count(), 2);
        // re-merging the merged table is a no-op
        assert_eq!(PatternTable::new(t, pt.patterns().to_vec()).unwrap(), pt);
    }

    #[test]
    fn indicator_edge_cases() {
        let t = VariableTable::from_codes(&[("a", 'A')], ("b", 'B')).unwrap();
        assert_eq!(pattern_indicator(0b11, &t), parse_poly("AB", &t).unwrap());
        assert_eq!(pattern_indicator(0, &t), parse_poly("AB + A + B + 1", &t).unwrap());
    }

    #[test]
    fn sigma_extremes() {
        let t = VariableTable::from_codes(&[("a", 'A')], ("b", 'B')).unwrap();
        assert!(build_sigma(&PatternTable::empty(t.clone())).is_one());
        let all = (0..4u64)
            .map(|b| Pattern {
                bits: b,
                record_ids: vec![format!("r{b}")],
            })
            .collect();
        let full = PatternTable::new(t, all).unwrap();
        assert!(build_sigma(&full).is_zero());
        assert_eq!(count_empty_criteria(&full), 0);
    }

    #[test]
    fn sigma_vanishes_exactly_on_observed() {
        let t = VariableTable::from_codes(&[("a", 'A'), ("b", 'B'), ("c", 'C')], ("s", 's')).unwrap();
        let observed = [0b0000u64, 0b0101, 0b1011, 0b1111, 0b0110];
        let pt = PatternTable::new(
            t.clone(),
            observed
                .iter()
                .map(|&b| Pattern {
                    bits: b,
                    record_ids: vec![b.to_string()],
                })
                .collect(),
        )
        .unwrap();
        let sigma = build_sigma(&pt);
        for a in 0..16u64 {
            assert_eq!(sigma.eval(&Assignment::full(a)).unwrap(), !observed.contains(&a));
        }
        assert_eq!(count_empty_criteria(&pt), 11);
    }

    #[test]
    fn doc_round_trip_and_validation() {
        let t = VariableTable::from_codes(&[("a", 'A')], ("s", 's')).unwrap();
        let pt = PatternTable::new(
            t,
            vec![
                Pattern {
                    bits: 0b01,
                    record_ids: vec!["x".into(), "y".into()],
                },
                Pattern {
                    bits: 0b10,
                    record_ids: vec!["z".into()],
                },
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&pt.to_doc()).unwrap();
        assert_eq!(PatternsDoc::from_json(&json).unwrap().to_table().unwrap(), pt);

        let mut doc = pt.to_doc();
        doc.patterns[0].multiplicity = 3;
        assert!(doc.to_table().is_err());
        let mut doc = pt.to_doc();
        doc.patterns[0].bits = "1x".into();
        assert!(doc.to_table().is_err());
        let mut doc = pt.to_doc();
        doc.format = "something-else".into();
        let json = serde_json::to_string(&doc).unwrap();
        assert!(matches!(PatternsDoc::from_json(&json), Err(DocError::Format { .. })));
    }
}
