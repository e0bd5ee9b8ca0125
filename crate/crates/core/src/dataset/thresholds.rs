use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DatasetError, RecordTable};
use crate::doc::{check_header, DocError};

/// Per-feature cut values; a value is "high" iff it is strictly above the cut.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    features: Vec<String>,
    cuts: Vec<f64>,
}

/// A feature whose realized "high" count differs from the class-positive
/// count because of ties at the cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub feature: String,
    pub cut: f64,
    pub expected_high: usize,
    pub realized_high: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub thresholds: Thresholds,
    pub positives: usize,
    pub deviations: Vec<Deviation>,
}

impl Thresholds {
    pub fn new(features: Vec<String>, cuts: Vec<f64>) -> Result<Self, DatasetError> {
        if features.len() != cuts.len() {
            return Err(DatasetError::Config("one cut per feature required".into()));
        }
        if let Some(i) = cuts.iter().position(|c| !c.is_finite()) {
            return Err(DatasetError::Config(format!("cut for '{}' is not finite", features[i])));
        }
        Ok(Self { features, cuts })
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn get(&self, feature: &str) -> Option<f64> {
        self.features.iter().position(|f| f == feature).map(|i| self.cuts[i])
    }

    /// Replaces the cuts named in `overrides`; unknown names are rejected.
    pub fn with_overrides(&self, overrides: &BTreeMap<String, f64>) -> Result<Self, DatasetError> {
        let mut cuts = self.cuts.clone();
        for (name, &cut) in overrides {
            let i = self
                .features
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| DatasetError::Config(format!("thresholds name unknown feature '{name}'")))?;
            cuts[i] = cut;
        }
        Self::new(self.features.clone(), cuts)
    }

    /// Cuts for `features` taken entirely from a thresholds document.
    pub fn from_map(features: &[&str], map: &BTreeMap<String, f64>) -> Result<Self, DatasetError> {
        if let Some(extra) = map.keys().find(|k| !features.contains(&k.as_str())) {
            return Err(DatasetError::Config(format!(
                "thresholds name unknown feature '{extra}'"
            )));
        }
        let cuts = features
            .iter()
            .map(|f| {
                map.get(*f)
                    .copied()
                    .ok_or_else(|| DatasetError::Config(format!("no threshold for feature '{f}'")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(features.iter().map(|s| s.to_string()).collect(), cuts)
    }

    pub fn to_doc(&self) -> ThresholdsDoc {
        ThresholdsDoc {
            format: THRESHOLDS_FORMAT.to_string(),
            version: THRESHOLDS_VERSION,
            cuts: self.to_map(),
        }
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.features.iter().cloned().zip(self.cuts.iter().copied()).collect()
    }
}

/// Cut for every feature at the `(k+1)`-th largest value, where `k` is the
/// number of class-positive records, so that exactly `k` values lie strictly
/// above it unless the `k`-th and `(k+1)`-th values tie.
pub fn compute_thresholds(table: &RecordTable) -> Result<ThresholdResult, DatasetError> {
    let n = table.len();
    let k = table.positives();
    if k == 0 || k == n {
        return Err(DatasetError::DegenerateClasses { positives: k, total: n });
    }
    let names: Vec<String> = table.feature_names().iter().map(|s| s.to_string()).collect();
    let mut cuts = Vec::with_capacity(names.len());
    let mut deviations = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let mut values: Vec<f64> = table.records().iter().map(|r| r.values[j]).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        let cut = values[k];
        let realized = values.iter().filter(|&&v| v > cut).count();
        if realized != k {
            deviations.push(Deviation {
                feature: name.clone(),
                cut,
                expected_high: k,
                realized_high: realized,
            });
        }
        cuts.push(cut);
    }
    Ok(ThresholdResult {
        thresholds: Thresholds::new(names, cuts)?,
        positives: k,
        deviations,
    })
}

pub const THRESHOLDS_FORMAT: &str = "lad-thresholds";
pub const THRESHOLDS_VERSION: u32 = 1;
pub const DEVIATIONS_FORMAT: &str = "lad-threshold-deviations";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdsDoc {
    pub format: String,
    pub version: u32,
    pub cuts: BTreeMap<String, f64>,
}

impl ThresholdsDoc {
    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let doc: ThresholdsDoc = serde_json::from_str(text)?;
        check_header(&doc.format, doc.version, THRESHOLDS_FORMAT, THRESHOLDS_VERSION)?;
        Ok(doc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationsDoc {
    pub format: String,
    pub version: u32,
    pub positives: usize,
    pub deviations: Vec<Deviation>,
}

impl ThresholdResult {
    pub fn deviations_doc(&self) -> DeviationsDoc {
        DeviationsDoc {
            format: DEVIATIONS_FORMAT.to_string(),
            version: THRESHOLDS_VERSION,
            positives: self.positives,
            deviations: self.deviations.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolring::VariableTable;
    use crate::dataset::Record;

    fn single_feature(values: &[f64], positives: usize) -> RecordTable {
        let t = VariableTable::from_codes(&[("f", 'F')], ("s", 's')).unwrap();
        let records = values
            .iter()
            .enumerate()
            .map(|(i, &v)| Record {
                id: format!("r{i}"),
                values: vec![v],
                class: i < positives,
            })
            .collect();
        RecordTable::new(t, records).unwrap()
    }

    #[test]
    fn distinct_values_give_exact_k() {
        let r = compute_thresholds(&single_feature(&[5.0, 4.0, 3.0, 2.0, 1.0], 2)).unwrap();
        assert_eq!(r.thresholds.cuts(), &[3.0]);
        assert!(r.deviations.is_empty());
    }

    #[test]
    fn ties_are_logged() {
        // order of records must not matter
        let r = compute_thresholds(&single_feature(&[4.0, 1.0, 5.0, 2.0, 4.0], 2)).unwrap();
        assert_eq!(r.thresholds.cuts(), &[4.0]);
        assert_eq!(
            r.deviations,
            vec![Deviation {
                feature: "f".into(),
                cut: 4.0,
                expected_high: 2,
                realized_high: 1
            }]
        );
    }

    #[test]
    fn degenerate_class_balance() {
        assert!(matches!(
            compute_thresholds(&single_feature(&[1.0, 2.0], 0)),
            Err(DatasetError::DegenerateClasses { positives: 0, total: 2 })
        ));
        assert!(matches!(
            compute_thresholds(&single_feature(&[1.0, 2.0], 2)),
            Err(DatasetError::DegenerateClasses { positives: 2, total: 2 })
        ));
    }

    #[test]
    fn overrides() {
        let r = compute_thresholds(&single_feature(&[5.0, 4.0, 3.0], 1)).unwrap();
        let mut o = BTreeMap::new();
        o.insert("f".to_string(), 10.0);
        assert_eq!(r.thresholds.with_overrides(&o).unwrap().cuts(), &[10.0]);
        o.insert("g".to_string(), 1.0);
        assert!(r.thresholds.with_overrides(&o).is_err());
    }
}
