use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BoolPoly, Monomial, RingError, VariableTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    /// Degree first, ties broken lexicographically.
    DegLex,
    /// Degree first, ties broken by the reverse-lexicographic rule.
    DegRevLex,
    Lex,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::DegLex => "deglex",
            OrderKind::DegRevLex => "degrevlex",
            OrderKind::Lex => "lex",
        })
    }
}

impl FromStr for OrderKind {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "deglex" | "grlex" => Ok(OrderKind::DegLex),
            "degrevlex" | "grevlex" => Ok(OrderKind::DegRevLex),
            "lex" => Ok(OrderKind::Lex),
            other => Err(RingError::UnknownOrder(other.to_string())),
        }
    }
}

/// A monomial order on squarefree monomials together with a variable
/// precedence (`precedence[0]` is the largest variable).
///
/// Internally every monomial is relabelled so that the order becomes a plain
/// integer comparison on the relabelled bits; relabelling is a bijection on
/// variables, so divisibility (subset) and products (union) are preserved.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    precedence: Vec<usize>,
    to_internal: Vec<u8>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, precedence: Vec<usize>) -> Result<Self, RingError> {
        let n = precedence.len();
        if n > 64 {
            return Err(RingError::TooManyVariables(n));
        }
        let mut seen = vec![false; n];
        for &v in &precedence {
            if v >= n || seen[v] {
                return Err(RingError::BadPrecedence);
            }
            seen[v] = true;
        }
        let mut to_internal = vec![0u8; n];
        for (rank, &v) in precedence.iter().enumerate() {
            to_internal[v] = match kind {
                OrderKind::Lex | OrderKind::DegLex => (n - 1 - rank) as u8,
                OrderKind::DegRevLex => rank as u8,
            };
        }
        Ok(Self {
            kind,
            precedence,
            to_internal,
        })
    }

    /// Variables ranked in table order (so the class variable, which is
    /// always last in a table, is the smallest).
    pub fn with_kind(kind: OrderKind, n_vars: usize) -> Self {
        Self::new(kind, (0..n_vars).collect()).expect("identity precedence")
    }

    /// Degree-lexicographic with table precedence.
    pub fn default_for(table: &VariableTable) -> Self {
        Self::with_kind(OrderKind::DegLex, table.len())
    }

    /// Parses a precedence string of variable codes, e.g. `"EFGLMyPxTs"`.
    pub fn from_codes(kind: OrderKind, codes: &str, table: &VariableTable) -> Result<Self, RingError> {
        let precedence = codes
            .chars()
            .map(|c| table.index_of_code(c).ok_or(RingError::UnknownVariable(c)))
            .collect::<Result<Vec<_>, _>>()?;
        if precedence.len() != table.len() {
            return Err(RingError::BadPrecedence);
        }
        Self::new(kind, precedence)
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn precedence(&self) -> &[usize] {
        &self.precedence
    }

    pub fn n_vars(&self) -> usize {
        self.precedence.len()
    }

    pub fn precedence_codes(&self, table: &VariableTable) -> String {
        self.precedence
            .iter()
            .map(|&v| table.get(v).map(|x| x.code).unwrap_or('?'))
            .collect()
    }

    pub(crate) fn to_internal(&self, m: Monomial) -> u64 {
        m.vars().fold(0u64, |acc, v| acc | (1u64 << self.to_internal[v]))
    }

    pub(crate) fn external(&self, bits: u64) -> Monomial {
        Monomial::from_vars(Monomial::from_bits(bits).vars().map(|b| self.internal_var(b)))
    }

    fn internal_var(&self, bit: usize) -> usize {
        match self.kind {
            OrderKind::Lex | OrderKind::DegLex => self.precedence[self.precedence.len() - 1 - bit],
            OrderKind::DegRevLex => self.precedence[bit],
        }
    }

    /// Sort key for relabelled monomials: comparing keys compares monomials.
    #[inline]
    pub(crate) fn key(&self, internal: u64) -> (u32, u64) {
        match self.kind {
            OrderKind::Lex => (0, internal),
            OrderKind::DegLex => (internal.count_ones(), internal),
            OrderKind::DegRevLex => (internal.count_ones(), !internal),
        }
    }

    pub fn cmp(&self, a: Monomial, b: Monomial) -> Ordering {
        self.key(self.to_internal(a)).cmp(&self.key(self.to_internal(b)))
    }

    /// Monomials of `p` in descending order.
    pub fn sorted_desc(&self, p: &BoolPoly) -> Vec<Monomial> {
        let mut terms: Vec<Monomial> = p.terms().to_vec();
        terms.sort_by(|a, b| self.cmp(*b, *a));
        terms
    }

    /// The order-maximal monomial of `p`.
    pub fn leading_monomial(&self, p: &BoolPoly) -> Result<Monomial, RingError> {
        p.terms()
            .iter()
            .copied()
            .max_by(|a, b| self.cmp(*a, *b))
            .ok_or(RingError::ZeroPolynomial)
    }

    pub fn check_table(&self, table: &VariableTable) -> Result<(), RingError> {
        if self.precedence.len() == table.len() {
            Ok(())
        } else {
            Err(RingError::BadPrecedence)
        }
    }

    pub fn to_doc(&self, table: &VariableTable) -> OrderDoc {
        OrderDoc {
            kind: self.kind,
            precedence: self.precedence_codes(table),
        }
    }
}

impl fmt::Debug for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonomialOrder({}, {:?})", self.kind, self.precedence)
    }
}

/// Serialized order descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderDoc {
    pub kind: OrderKind,
    pub precedence: String,
}

impl OrderDoc {
    pub fn to_order(&self, table: &VariableTable) -> Result<MonomialOrder, RingError> {
        MonomialOrder::from_codes(self.kind, &self.precedence, table)
    }
}

/// Free-function form of [`MonomialOrder::leading_monomial`].
pub fn leading_monomial(p: &BoolPoly, order: &MonomialOrder) -> Result<Monomial, RingError> {
    order.leading_monomial(p)
}
