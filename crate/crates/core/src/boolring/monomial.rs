use std::fmt;

/// A squarefree monomial: the set of variables it contains, as a bit set
/// indexed by [`super::VariableTable`] position. The empty set is the
/// monomial `1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub const fn from_bits(bits: u64) -> Self {
        Monomial(bits)
    }

    pub fn from_vars(vars: impl IntoIterator<Item = usize>) -> Self {
        Monomial(vars.into_iter().fold(0, |acc, v| acc | (1u64 << v)))
    }

    pub fn var(index: usize) -> Self {
        Monomial(1u64 << index)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, var: usize) -> bool {
        self.0 & (1u64 << var) != 0
    }

    /// Idempotent product: `v * v = v`, so this is set union.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Monomial) -> Monomial {
        Monomial(self.0 | other.0)
    }

    /// `self` divides `other` iff it is a subset.
    pub fn divides(self, other: Monomial) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest cofactor `c` with `c * self == other`, if `self` divides `other`.
    pub fn cofactor_in(self, other: Monomial) -> Option<Monomial> {
        self.divides(other).then_some(Monomial(other.0 & !self.0))
    }

    pub fn lcm(self, other: Monomial) -> Monomial {
        self.mul(other)
    }

    pub fn is_coprime(self, other: Monomial) -> bool {
        self.0 & other.0 == 0
    }

    /// Evaluates the monomial (AND of its variables) on a bit assignment.
    pub fn eval(self, assignment: u64) -> bool {
        self.0 & assignment == self.0
    }

    pub fn without(self, var: usize) -> Monomial {
        Monomial(self.0 & !(1u64 << var))
    }

    pub fn vars(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.vars().map(|v| format!("x{v}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}
