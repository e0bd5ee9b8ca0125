use std::ops::{Add, Mul};

use super::{Monomial, RingError};

/// A Boolean polynomial: a set of distinct squarefree monomials with
/// implicit GF(2) coefficients. The empty set is `0`.
///
/// Terms are kept sorted by raw bit value so that equal polynomials are
/// structurally equal no matter how they were built.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BoolPoly {
    terms: Vec<Monomial>,
}

/// A (possibly partial) assignment of bits to variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub bits: u64,
    /// Variables that carry a value.
    pub defined: u64,
}

impl Assignment {
    pub fn full(bits: u64) -> Self {
        Self {
            bits,
            defined: u64::MAX,
        }
    }

    pub fn partial(bits: u64, defined: u64) -> Self {
        Self {
            bits: bits & defined,
            defined,
        }
    }
}

/// Sorts and cancels repeated monomials in pairs.
fn canonicalize(mut terms: Vec<Monomial>) -> Vec<Monomial> {
    terms.sort_unstable();
    let mut out = Vec::with_capacity(terms.len());
    let mut i = 0;
    while i < terms.len() {
        let mut j = i + 1;
        while j < terms.len() && terms[j] == terms[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(terms[i]);
        }
        i = j;
    }
    out
}

impl BoolPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self {
            terms: vec![Monomial::ONE],
        }
    }

    pub fn var(index: usize) -> Self {
        Self {
            terms: vec![Monomial::var(index)],
        }
    }

    pub fn monomial(m: Monomial) -> Self {
        Self { terms: vec![m] }
    }

    /// Sums the given monomials mod 2 (repeats cancel).
    pub fn from_monomials(terms: impl IntoIterator<Item = Monomial>) -> Self {
        Self {
            terms: canonicalize(terms.into_iter().collect()),
        }
    }

    pub(crate) fn from_sorted_unique(terms: Vec<Monomial>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0] < w[1]));
        Self { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_one()
    }

    pub fn has_constant(&self) -> bool {
        self.terms.first().is_some_and(|m| m.is_one())
    }

    /// Union of all variables that occur in some monomial.
    pub fn support(&self) -> u64 {
        self.terms.iter().fold(0, |acc, m| acc | m.bits())
    }

    pub fn variable_count(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.support() & (1u64 << var) != 0
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|m| m.degree()).max()
    }

    /// GF(2) sum: symmetric difference of the monomial sets.
    pub fn add(&self, other: &BoolPoly) -> BoolPoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        BoolPoly { terms: out }
    }

    /// Idempotent product; pairs of products that collapse onto the same
    /// monomial cancel.
    pub fn mul(&self, other: &BoolPoly) -> BoolPoly {
        let mut prods = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &a in &self.terms {
            for &b in &other.terms {
                prods.push(a.mul(b));
            }
        }
        BoolPoly {
            terms: canonicalize(prods),
        }
    }

    pub fn mul_monomial(&self, m: Monomial) -> BoolPoly {
        BoolPoly {
            terms: canonicalize(self.terms.iter().map(|t| t.mul(m)).collect()),
        }
    }

    /// `self + 1`.
    pub fn negate(&self) -> BoolPoly {
        self.add(&BoolPoly::one())
    }

    /// Evaluates on a full assignment given as a bit mask.
    pub fn eval_bits(&self, bits: u64) -> bool {
        self.terms.iter().filter(|m| m.eval(bits)).count() % 2 == 1
    }

    /// Evaluates on an assignment; every variable of `self` must be defined.
    pub fn eval(&self, assignment: &Assignment) -> Result<bool, RingError> {
        let missing = self.support() & !assignment.defined;
        if missing != 0 {
            return Err(RingError::UnassignedVariable(missing.trailing_zeros() as usize));
        }
        Ok(self.eval_bits(assignment.bits))
    }

    /// Substitutes `var := value`.
    pub fn restrict(&self, var: usize, value: bool) -> BoolPoly {
        let terms = self.terms.iter().filter_map(|m| {
            if !m.contains(var) {
                Some(*m)
            } else if value {
                Some(m.without(var))
            } else {
                None
            }
        });
        BoolPoly::from_monomials(terms)
    }
}

impl std::fmt::Debug for BoolPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|m| format!("{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &BoolPoly {
    type Output = BoolPoly;
    fn add(self, rhs: &BoolPoly) -> BoolPoly {
        BoolPoly::add(self, rhs)
    }
}

impl Mul for &BoolPoly {
    type Output = BoolPoly;
    fn mul(self, rhs: &BoolPoly) -> BoolPoly {
        BoolPoly::mul(self, rhs)
    }
}

impl From<Monomial> for BoolPoly {
    fn from(m: Monomial) -> Self {
        BoolPoly::monomial(m)
    }
}

/// GF(2) sum of two polynomials.
pub fn poly_add(p: &BoolPoly, q: &BoolPoly) -> BoolPoly {
    p.add(q)
}

/// Idempotent product of two polynomials.
pub fn poly_mul(p: &BoolPoly, q: &BoolPoly) -> BoolPoly {
    p.mul(q)
}

pub fn poly_eval(p: &BoolPoly, assignment: &Assignment) -> Result<bool, RingError> {
    p.eval(assignment)
}

pub fn mono_mul(a: Monomial, b: Monomial) -> Monomial {
    a.mul(b)
}
