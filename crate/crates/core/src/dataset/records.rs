use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::boolring::{Variable, VariableTable};

/// Sidecar configuration mapping CSV columns to variable codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableMap {
    #[serde(default = "default_id_column")]
    pub id_column: String,
    pub features: Vec<FeatureColumn>,
    pub class: ClassColumn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub column: String,
    pub code: char,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassColumn {
    pub column: String,
    pub code: char,
    /// Cell values read as class 1.
    #[serde(default = "default_positive")]
    pub positive: Vec<String>,
    /// Cell values read as class 0.
    #[serde(default = "default_negative")]
    pub negative: Vec<String>,
}

fn default_id_column() -> String {
    "record_id".to_string()
}

fn default_positive() -> Vec<String> {
    vec!["1".to_string()]
}

fn default_negative() -> Vec<String> {
    vec!["0".to_string()]
}

impl VariableMap {
    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        serde_json::from_str(text).map_err(|e| DatasetError::Config(e.to_string()))
    }

    pub fn variable_table(&self) -> Result<VariableTable, DatasetError> {
        let features = self
            .features
            .iter()
            .map(|f| Variable {
                name: f.column.clone(),
                code: f.code,
            })
            .collect();
        let class = Variable {
            name: self.class.column.clone(),
            code: self.class.code,
        };
        Ok(VariableTable::new(features, class)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    /// One value per feature, in table order.
    pub values: Vec<f64>,
    pub class: bool,
}

/// Validated numeric records with a binary class.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordTable {
    table: VariableTable,
    records: Vec<Record>,
}

impl RecordTable {
    /// Validates ids and value counts.
    pub fn new(table: VariableTable, records: Vec<Record>) -> Result<Self, DatasetError> {
        let mut seen = HashSet::new();
        for (i, r) in records.iter().enumerate() {
            if !seen.insert(r.id.as_str()) {
                return Err(DatasetError::DuplicateId {
                    line: i + 2,
                    id: r.id.clone(),
                });
            }
            if r.values.len() != table.feature_count() {
                return Err(DatasetError::RowLength {
                    line: i + 2,
                    expected: table.feature_count(),
                    found: r.values.len(),
                });
            }
            if let Some(j) = r.values.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonNumeric {
                    line: i + 2,
                    column: table.features()[j].name.clone(),
                    value: r.values[j].to_string(),
                });
            }
        }
        Ok(Self { table, records })
    }

    pub fn table(&self) -> &VariableTable {
        &self.table
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.records.iter().filter(|r| r.class).count()
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.table.features().iter().map(|v| v.name.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }
}

/// Reads delimited text with a header row. Columns are located by name via
/// the variable map; extra columns are ignored.
pub fn parse_records<R: Read>(source: R, map: &VariableMap) -> Result<RecordTable, DatasetError> {
    let table = map.variable_table()?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader
        .headers()
        .map_err(|e| DatasetError::Csv {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let locate = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::MissingColumn(name.to_string()))
    };
    let id_col = locate(&map.id_column)?;
    let feature_cols = map
        .features
        .iter()
        .map(|f| locate(&f.column))
        .collect::<Result<Vec<_>, _>>()?;
    let class_col = locate(&map.class.column)?;

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| DatasetError::Csv {
            line,
            message: e.to_string(),
        })?;
        if row.len() != header.len() {
            return Err(DatasetError::RowLength {
                line,
                expected: header.len(),
                found: row.len(),
            });
        }
        let id = row[id_col].to_string();
        if id.is_empty() {
            return Err(DatasetError::EmptyCell {
                line,
                column: map.id_column.clone(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(DatasetError::DuplicateId { line, id });
        }
        let mut values = Vec::with_capacity(feature_cols.len());
        for (f, &col) in map.features.iter().zip(&feature_cols) {
            let cell = &row[col];
            if cell.is_empty() {
                return Err(DatasetError::EmptyCell {
                    line,
                    column: f.column.clone(),
                });
            }
            let v: f64 = cell.parse().map_err(|_| DatasetError::NonNumeric {
                line,
                column: f.column.clone(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::NonNumeric {
                    line,
                    column: f.column.clone(),
                    value: cell.to_string(),
                });
            }
            values.push(v);
        }
        let label = &row[class_col];
        let class = if map.class.positive.iter().any(|p| p == label) {
            true
        } else if map.class.negative.iter().any(|n| n == label) {
            false
        } else {
            return Err(DatasetError::BadClass {
                line,
                value: label.to_string(),
            });
        };
        records.push(Record { id, values, class });
    }
    Ok(RecordTable { table, records })
}
