use serde::{Deserialize, Serialize};

use super::RingError;

/// Total number of variables a [`VariableTable`] may hold (62 features + class).
pub const MAX_VARIABLES: usize = 63;

/// One Boolean variable: a human-readable name and the single-letter code
/// used in polynomial text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub code: char,
}

/// Ordered feature variables followed by exactly one class variable.
///
/// Position in the table is the bit index used by [`super::Monomial`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    variables: Vec<Variable>,
    class_index: usize,
}

impl VariableTable {
    /// Builds a table from feature variables and the class variable, which is
    /// appended last.
    pub fn new(features: Vec<Variable>, class: Variable) -> Result<Self, RingError> {
        if features.len() + 1 > MAX_VARIABLES {
            return Err(RingError::TooManyVariables(features.len() + 1));
        }
        let mut variables = features;
        variables.push(class);
        for (i, v) in variables.iter().enumerate() {
            if !v.code.is_ascii_alphabetic() {
                return Err(RingError::InvalidCode(v.code));
            }
            if variables[..i].iter().any(|w| w.code == v.code) {
                return Err(RingError::DuplicateCode(v.code));
            }
        }
        let class_index = variables.len() - 1;
        Ok(Self { variables, class_index })
    }

    /// Convenience constructor from `(name, code)` pairs.
    pub fn from_codes(features: &[(&str, char)], class: (&str, char)) -> Result<Self, RingError> {
        let features = features
            .iter()
            .map(|&(name, code)| Variable {
                name: name.to_string(),
                code,
            })
            .collect();
        Self::new(
            features,
            Variable {
                name: class.0.to_string(),
                code: class.1,
            },
        )
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.variables.len() - 1
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_variable(&self) -> &Variable {
        &self.variables[self.class_index]
    }

    /// Bit mask of the class variable.
    pub fn class_mask(&self) -> u64 {
        1u64 << self.class_index
    }

    /// Bit mask covering every variable of the table.
    pub fn full_mask(&self) -> u64 {
        if self.variables.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.variables.len()) - 1
        }
    }

    pub fn feature_mask(&self) -> u64 {
        self.full_mask() & !self.class_mask()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn features(&self) -> &[Variable] {
        &self.variables[..self.class_index]
    }

    pub fn get(&self, index: usize) -> Option<&Variable> {
        self.variables.get(index)
    }

    pub fn index_of_code(&self, code: char) -> Option<usize> {
        self.variables.iter().position(|v| v.code == code)
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// All codes in table order, e.g. `"EFGLMyPxTs"`.
    pub fn codes(&self) -> String {
        self.variables.iter().map(|v| v.code).collect()
    }
}

/// Serialized form of a table: the class flag is explicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableDoc {
    pub name: String,
    pub code: char,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub class: bool,
}

impl VariableTable {
    pub fn to_docs(&self) -> Vec<VariableDoc> {
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| VariableDoc {
                name: v.name.clone(),
                code: v.code,
                class: i == self.class_index,
            })
            .collect()
    }

    /// Rebuilds a table from its serialized form. The class variable must be
    /// flagged exactly once and sit in the last position.
    pub fn from_docs(docs: &[VariableDoc]) -> Result<Self, RingError> {
        let flagged: Vec<usize> = docs
            .iter()
            .enumerate()
            .filter(|(_, d)| d.class)
            .map(|(i, _)| i)
            .collect();
        match flagged.as_slice() {
            [i] if *i + 1 == docs.len() => {}
            [_] => return Err(RingError::ClassNotLast),
            _ => return Err(RingError::ClassCount(flagged.len())),
        }
        let mut vars: Vec<Variable> = docs
            .iter()
            .map(|d| Variable {
                name: d.name.clone(),
                code: d.code,
            })
            .collect();
        let class = vars.pop().expect("class flagged");
        Self::new(vars, class)
    }
}
