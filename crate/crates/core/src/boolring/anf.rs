use super::{BoolPoly, Monomial, RingError};

/// Largest table the exhaustive transform accepts.
pub const MAX_ANF_VARS: usize = 20;

/// Algebraic normal form of a function given by its truth table.
///
/// `table[a]` is the value on the assignment whose bit `i` is variable `i`.
/// The Möbius transform runs in place in `O(n 2^n)`.
pub fn anf_from_truth_table(n_vars: usize, table: &[bool]) -> Result<BoolPoly, RingError> {
    if n_vars > MAX_ANF_VARS {
        return Err(RingError::TooManyVariables(n_vars));
    }
    if table.len() != 1usize << n_vars {
        return Err(RingError::TruthTableSize {
            expected: 1usize << n_vars,
            actual: table.len(),
        });
    }
    let mut coeffs = table.to_vec();
    for i in 0..n_vars {
        let step = 1usize << i;
        for a in 0..coeffs.len() {
            if a & step != 0 {
                coeffs[a] ^= coeffs[a ^ step];
            }
        }
    }
    let terms: Vec<Monomial> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(a, _)| Monomial::from_bits(a as u64))
        .collect();
    Ok(BoolPoly::from_sorted_unique(terms))
}

/// Truth table of `p` over the first `n_vars` variables.
pub fn truth_table(p: &BoolPoly, n_vars: usize) -> Vec<bool> {
    (0..1u64 << n_vars).map(|a| p.eval_bits(a)).collect()
}
