//! Normal forms, S-polynomials and Buchberger's algorithm in the Boolean
//! quotient ring.
//!
//! All arithmetic stays squarefree. The field relations `v^2 + v` are never
//! stored; instead, for every basis element `g` and every variable `v` of its
//! leading monomial, the product `v * g` must reduce to zero. Together with
//! the ordinary S-pairs this is exactly the Gröbner criterion for
//! `G ∪ {v^2 + v}` in the polynomial ring.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::boolring::{BoolPoly, Monomial, MonomialOrder, OrderDoc, RingError, VariableDoc, VariableTable};
use crate::doc::{check_header, DocError};

/// Terms in relabelled form, ascending in the order (leading term last).
type Terms = Vec<u64>;

struct Arith<'a> {
    order: &'a MonomialOrder,
}

impl Arith<'_> {
    #[inline]
    fn key(&self, t: u64) -> (u32, u64) {
        self.order.key(t)
    }

    fn import(&self, p: &BoolPoly) -> Terms {
        let mut t: Terms = p.terms().iter().map(|&m| self.order.to_internal(m)).collect();
        t.sort_unstable_by_key(|&x| self.key(x));
        t
    }

    fn export(&self, t: &[u64]) -> BoolPoly {
        BoolPoly::from_monomials(t.iter().map(|&x| self.order.external(x)))
    }

    fn canonicalize(&self, mut t: Terms) -> Terms {
        t.sort_unstable_by_key(|&x| self.key(x));
        let mut out = Vec::with_capacity(t.len());
        let mut i = 0;
        while i < t.len() {
            let mut j = i + 1;
            while j < t.len() && t[j] == t[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                out.push(t[i]);
            }
            i = j;
        }
        out
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Terms {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (ka, kb) = (self.key(a[i]), self.key(b[j]));
            match ka.cmp(&kb) {
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
        out
    }

    fn mul_mono(&self, g: &[u64], c: u64) -> Terms {
        if c == 0 {
            return g.to_vec();
        }
        self.canonicalize(g.iter().map(|&t| t | c).collect())
    }

    /// Full reduction of `p` by `basis` (every term, not just the leading one).
    fn normal_form(&self, mut p: Terms, basis: &[Terms]) -> Terms {
        let mut rem: Terms = Vec::new();
        while let Some(&t) = p.last() {
            let divisor = basis.iter().find(|g| {
                let lm = *g.last().expect("basis elements are nonzero");
                lm & !t == 0
            });
            match divisor {
                Some(g) => {
                    let lm = *g.last().unwrap();
                    let prod = self.mul_mono(g, t & !lm);
                    debug_assert_eq!(prod.last(), Some(&t));
                    p = self.add(&p, &prod);
                }
                None => {
                    rem.push(t);
                    p.pop();
                }
            }
        }
        rem.reverse();
        rem
    }

    fn s_polynomial(&self, f: &[u64], g: &[u64]) -> Terms {
        let (lf, lg) = (*f.last().unwrap(), *g.last().unwrap());
        let lcm = lf | lg;
        self.add(&self.mul_mono(f, lcm & !lf), &self.mul_mono(g, lcm & !lg))
    }
}

/// A Gröbner basis together with the order it was computed for.
#[derive(Clone)]
pub struct GroebnerBasis {
    elements: Vec<BoolPoly>,
    order: MonomialOrder,
    reduced: bool,
    internal: Vec<Terms>,
}

impl GroebnerBasis {
    fn from_internal(internal: Vec<Terms>, order: MonomialOrder, reduced: bool) -> Self {
        let arith = Arith { order: &order };
        let elements = internal.iter().map(|t| arith.export(t)).collect();
        Self {
            elements,
            order,
            reduced,
            internal,
        }
    }

    /// Wraps polynomials that are already known to form a basis (e.g. an
    /// imported document). Elements are re-sorted by leading monomial.
    pub fn from_elements(elements: &[BoolPoly], order: MonomialOrder, reduced: bool) -> Result<Self, RingError> {
        let arith = Arith { order: &order };
        let mut internal = Vec::with_capacity(elements.len());
        for p in elements {
            if p.is_zero() {
                return Err(RingError::ZeroPolynomial);
            }
            internal.push(arith.import(p));
        }
        internal.sort_by_key(|t| arith.key(*t.last().unwrap()));
        Ok(Self::from_internal(internal, order, reduced))
    }

    /// The empty basis of the zero ideal.
    pub fn empty(order: MonomialOrder) -> Self {
        Self::from_internal(Vec::new(), order, true)
    }

    pub fn elements(&self) -> &[BoolPoly] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].is_one()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.internal
            .iter()
            .map(|t| self.order.external(*t.last().unwrap()))
            .collect()
    }

    pub fn normal_form(&self, p: &BoolPoly) -> BoolPoly {
        let arith = Arith { order: &self.order };
        let r = arith.normal_form(arith.import(p), &self.internal);
        arith.export(&r)
    }

    /// Normal form of a product, reduced after every factor so that
    /// intermediate results stay small.
    pub fn normal_form_of_product(&self, factors: &[BoolPoly]) -> BoolPoly {
        let arith = Arith { order: &self.order };
        let mut acc = arith.normal_form(vec![0], &self.internal);
        for f in factors {
            let f = arith.import(f);
            let prod: Terms = acc.iter().flat_map(|&a| f.iter().map(move |&b| a | b)).collect();
            acc = arith.normal_form(arith.canonicalize(prod), &self.internal);
            if acc.is_empty() {
                break;
            }
        }
        arith.export(&acc)
    }

    /// Ideal membership: the normal form is zero.
    pub fn contains(&self, p: &BoolPoly) -> bool {
        self.normal_form(p).is_zero()
    }

    pub fn to_doc(&self, table: &VariableTable) -> BasisDoc {
        BasisDoc {
            format: BASIS_FORMAT.to_string(),
            version: BASIS_VERSION,
            variables: table.to_docs(),
            order: self.order.to_doc(table),
            reduced: self.reduced,
            polynomials: self.elements.iter().map(|p| p.display(table).to_string()).collect(),
        }
    }
}

impl std::fmt::Debug for GroebnerBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroebnerBasis")
            .field("order", &self.order)
            .field("reduced", &self.reduced)
            .field("elements", &self.elements)
            .finish()
    }
}

impl PartialEq for GroebnerBasis {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.reduced == other.reduced && self.elements == other.elements
    }
}

/// Remainder of multivariate division of `p` by `basis`.
pub fn normal_form(p: &BoolPoly, basis: &[BoolPoly], order: &MonomialOrder) -> BoolPoly {
    let arith = Arith { order };
    let internal: Vec<Terms> = basis.iter().filter(|g| !g.is_zero()).map(|g| arith.import(g)).collect();
    arith.export(&arith.normal_form(arith.import(p), &internal))
}

/// `(lcm/lm(f)) f + (lcm/lm(g)) g` with idempotent cofactor products.
pub fn s_polynomial(f: &BoolPoly, g: &BoolPoly, order: &MonomialOrder) -> Result<BoolPoly, RingError> {
    if f.is_zero() || g.is_zero() {
        return Err(RingError::ZeroPolynomial);
    }
    let arith = Arith { order };
    Ok(arith.export(&arith.s_polynomial(&arith.import(f), &arith.import(g))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Pair {
    /// `v * g_i` for a variable `v` of `lm(g_i)`.
    Field {
        element: usize,
        var: u32,
    },
    Ordinary {
        i: usize,
        j: usize,
    },
}

type Queue = BTreeSet<((u32, u64), Pair)>;

struct Work<'a> {
    arith: Arith<'a>,
    basis: Vec<Terms>,
    /// Elements used for reduction and new pairs; an element whose leading
    /// monomial is a multiple of a newer one drops out.
    active: Vec<bool>,
    queue: Queue,
}

impl Work<'_> {
    fn lm(&self, i: usize) -> u64 {
        *self.basis[i].last().unwrap()
    }

    fn reduce(&self, p: Terms) -> Terms {
        let reducers: Vec<Terms> = self
            .basis
            .iter()
            .zip(&self.active)
            .filter(|(_, &a)| a)
            .map(|(g, _)| g.clone())
            .collect();
        self.arith.normal_form(p, &reducers)
    }

    /// Adds `h` (already reduced) with Gebauer-Möller pair bookkeeping.
    fn push(&mut self, h: Terms) {
        let lm_h = *h.last().unwrap();
        let idx = self.basis.len();

        // chain criterion on pending ordinary pairs
        let stale: Vec<_> = self
            .queue
            .iter()
            .filter(|(_, pair)| match *pair {
                Pair::Ordinary { i, j } => {
                    let l = self.lm(i) | self.lm(j);
                    lm_h & !l == 0 && (self.lm(i) | lm_h) != l && (self.lm(j) | lm_h) != l
                }
                Pair::Field { .. } => false,
            })
            .copied()
            .collect();
        for e in stale {
            self.queue.remove(&e);
        }

        // new ordinary pairs: keep one per minimal lcm, none where that lcm
        // is also reached by a coprime pair
        let fresh: Vec<(usize, u64, bool)> = (0..idx)
            .filter(|&i| self.active[i])
            .map(|i| (i, self.lm(i) | lm_h, self.lm(i) & lm_h == 0))
            .collect();
        let mut kept: Vec<(usize, u64)> = Vec::new();
        for &(i, l, _) in &fresh {
            let dominated = fresh.iter().any(|&(_, l2, _)| l2 != l && l2 & !l == 0);
            if dominated || kept.iter().any(|&(_, k)| k == l) {
                continue;
            }
            if fresh.iter().any(|&(_, l2, coprime)| coprime && l2 == l) {
                continue;
            }
            kept.push((i, l));
        }
        for (i, l) in kept {
            self.queue.insert((self.arith.key(l), Pair::Ordinary { i, j: idx }));
        }

        let mut bits = lm_h;
        while bits != 0 {
            let var = bits.trailing_zeros();
            bits &= bits - 1;
            self.queue
                .insert((self.arith.key(lm_h), Pair::Field { element: idx, var }));
        }

        for i in 0..idx {
            if self.active[i] && lm_h & !self.lm(i) == 0 {
                self.active[i] = false;
            }
        }
        self.basis.push(h);
        self.active.push(true);
    }
}

/// Reduced Gröbner basis of the ideal generated by `generators`.
pub fn buchberger(generators: &[BoolPoly], order: &MonomialOrder) -> GroebnerBasis {
    let unit = || GroebnerBasis::from_internal(vec![vec![0]], order.clone(), true);
    let mut w = Work {
        arith: Arith { order },
        basis: Vec::new(),
        active: Vec::new(),
        queue: BTreeSet::new(),
    };

    for gen in generators {
        let h = w.reduce(w.arith.import(gen));
        if h.is_empty() {
            continue;
        }
        if h == [0] {
            return unit();
        }
        w.push(h);
    }

    // normal selection: smallest lcm first, then a fixed tie-break
    while let Some((_, pair)) = w.queue.pop_first() {
        let candidate = match pair {
            Pair::Ordinary { i, j } => w.arith.s_polynomial(&w.basis[i], &w.basis[j]),
            Pair::Field { element, var } => w.arith.mul_mono(&w.basis[element], 1u64 << var),
        };
        let h = w.reduce(candidate);
        if h.is_empty() {
            continue;
        }
        if h == [0] {
            return unit();
        }
        w.push(h);
    }

    let Work {
        arith, basis, active, ..
    } = w;
    let live = basis
        .into_iter()
        .zip(active)
        .filter(|(_, a)| *a)
        .map(|(g, _)| g)
        .collect();
    GroebnerBasis::from_internal(interreduce(&arith, live), order.clone(), true)
}

/// Reduced Gröbner basis of the ideal of all polynomials vanishing on
/// `points` (full assignments, bit `i` = variable `i`).
///
/// Monomials are visited in increasing order; each one's evaluation vector
/// over the points is reduced against those of the standard monomials found
/// so far. A dependent monomial `m` yields the basis element `m + (standard
/// combination agreeing with m on every point)`.
pub fn vanishing_basis(points: &[u64], order: &MonomialOrder) -> GroebnerBasis {
    let arith = Arith { order };
    let mut pts: Vec<u64> = points
        .iter()
        .map(|&p| order.to_internal(Monomial::from_bits(p)))
        .collect();
    pts.sort_unstable();
    pts.dedup();
    let n = order.n_vars();
    let words = pts.len().div_ceil(64).max(1);

    // echelon rows: evaluation vector + combination of standard monomials
    let mut standard: Vec<u64> = Vec::new();
    let mut rows: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
    let mut pivot_row: Vec<Option<usize>> = vec![None; pts.len()];
    let mut leading: Vec<u64> = Vec::new();
    let mut elements: Vec<Terms> = Vec::new();

    let mut queue: BTreeSet<((u32, u64), u64)> = BTreeSet::new();
    queue.insert((arith.key(0), 0));
    while let Some((_, m)) = queue.pop_first() {
        if leading.iter().any(|&l| l & !m == 0) {
            continue;
        }
        let mut vec = vec![0u64; words];
        for (j, &p) in pts.iter().enumerate() {
            if m & !p == 0 {
                vec[j / 64] |= 1 << (j % 64);
            }
        }
        let mut combo = vec![0u64; words];
        // Some(combo) when m depends on the standard monomials
        let dependent = loop {
            let Some(w) = vec.iter().position(|&x| x != 0) else {
                break Some(combo);
            };
            let bit = w * 64 + vec[w].trailing_zeros() as usize;
            let Some(r) = pivot_row[bit] else {
                let k = standard.len();
                combo[k / 64] ^= 1 << (k % 64);
                standard.push(m);
                pivot_row[bit] = Some(rows.len());
                rows.push((vec, combo));
                for v in 0..n {
                    if m & (1 << v) == 0 {
                        let t = m | (1 << v);
                        queue.insert((arith.key(t), t));
                    }
                }
                break None;
            };
            for (a, b) in vec.iter_mut().zip(&rows[r].0) {
                *a ^= b;
            }
            for (a, b) in combo.iter_mut().zip(&rows[r].1) {
                *a ^= b;
            }
        };
        let Some(combo) = dependent else { continue };
        let mut terms: Terms = vec![m];
        for (k, &s) in standard.iter().enumerate() {
            if combo[k / 64] >> (k % 64) & 1 == 1 {
                terms.push(s);
            }
        }
        leading.push(m);
        elements.push(arith.canonicalize(terms));
    }
    GroebnerBasis::from_internal(elements, order.clone(), true)
}

/// Drops elements with redundant leading monomials, then tail-reduces.
fn interreduce(arith: &Arith<'_>, mut basis: Vec<Terms>) -> Vec<Terms> {
    basis.sort_by_key(|t| arith.key(*t.last().unwrap()));
    let mut minimal: Vec<Terms> = Vec::with_capacity(basis.len());
    for g in basis {
        let lm = *g.last().unwrap();
        if minimal.iter().all(|k| {
            let lk = *k.last().unwrap();
            lk & !lm != 0
        }) {
            minimal.push(g);
        }
    }
    for i in 0..minimal.len() {
        let current = std::mem::take(&mut minimal[i]);
        let others: Vec<Terms> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, t)| t.clone())
            .collect();
        minimal[i] = arith.normal_form(current, &others);
    }
    minimal
}

pub const BASIS_FORMAT: &str = "lad-basis";
pub const BASIS_VERSION: u32 = 1;

/// Versioned export of a basis: canonical polynomial strings plus the order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub format: String,
    pub version: u32,
    pub variables: Vec<VariableDoc>,
    pub order: OrderDoc,
    pub reduced: bool,
    pub polynomials: Vec<String>,
}

impl BasisDoc {
    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let doc: BasisDoc = serde_json::from_str(text)?;
        check_header(&doc.format, doc.version, BASIS_FORMAT, BASIS_VERSION)?;
        Ok(doc)
    }

    pub fn to_basis(&self) -> Result<(VariableTable, GroebnerBasis), DocError> {
        let table = VariableTable::from_docs(&self.variables)?;
        let order = self.order.to_order(&table)?;
        let polys = self
            .polynomials
            .iter()
            .map(|s| crate::boolring::parse_poly(s, &table))
            .collect::<Result<Vec<_>, _>>()?;
        let basis = GroebnerBasis::from_elements(&polys, order, self.reduced)?;
        Ok((table, basis))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolring::{parse_poly, OrderKind};

    fn abc() -> VariableTable {
        VariableTable::from_codes(&[("a", 'A'), ("b", 'B')], ("c", 'C')).unwrap()
    }

    fn p(s: &str, t: &VariableTable) -> BoolPoly {
        parse_poly(s, t).unwrap()
    }

    #[test]
    fn generator_reduces_to_zero() {
        let t = abc();
        let o = MonomialOrder::default_for(&t);
        let g = p("AB + A", &t);
        assert!(normal_form(&g, std::slice::from_ref(&g), &o).is_zero());
        let q = p("AC + B + 1", &t);
        assert_eq!(normal_form(&q, &[], &o), q);
    }

    #[test]
    fn s_polynomial_examples() {
        let t = abc();
        let lex = MonomialOrder::with_kind(OrderKind::Lex, 3);
        let f = p("AB + A", &t);
        let g = p("BC + C", &t);
        assert!(s_polynomial(&f, &f, &lex).unwrap().is_zero());
        // lcm ABC; C f + A g = (ABC + AC) + (ABC + AC)
        assert!(s_polynomial(&f, &g, &lex).unwrap().is_zero());
        assert!(s_polynomial(&f, &BoolPoly::zero(), &lex).is_err());
    }

    #[test]
    fn buchberger_small_cases() {
        let t = abc();
        let o = MonomialOrder::default_for(&t);
        let single = buchberger(&[p("A(B+1)", &t)], &o);
        assert_eq!(single.elements(), &[p("AB + A", &t)]);
        let unit = buchberger(&[p("A", &t), p("A + 1", &t)], &o);
        assert!(unit.is_unit());
        assert!(buchberger(&[], &o).is_empty());
        assert!(buchberger(&[BoolPoly::zero()], &o).is_empty());
    }

    #[test]
    fn field_pairs_are_needed() {
        // AB + A + C: A*(AB + A + C) = AB + A + AC, which reduces to AC + C
        let t = abc();
        let o = MonomialOrder::default_for(&t);
        let gb = buchberger(&[p("AB + A + C", &t)], &o);
        assert!(gb.contains(&p("AC + C", &t)));
        assert!(gb.contains(&p("BC", &t)));
    }

    #[test]
    fn vanishing_basis_matches_buchberger() {
        let t = abc();
        for kind in [OrderKind::DegLex, OrderKind::DegRevLex, OrderKind::Lex] {
            let o = MonomialOrder::with_kind(kind, 3);
            for set in 0u32..256 {
                let points: Vec<u64> = (0..8).filter(|b| set >> b & 1 == 1).collect();
                let table = crate::dataset::PatternTable::new(
                    t.clone(),
                    points
                        .iter()
                        .map(|&b| crate::dataset::Pattern {
                            bits: b,
                            record_ids: vec![b.to_string()],
                        })
                        .collect(),
                )
                .unwrap();
                let sigma = crate::dataset::build_sigma(&table);
                assert_eq!(
                    vanishing_basis(&points, &o),
                    buchberger(&[sigma], &o),
                    "{kind} {set:08b}"
                );
            }
        }
    }

    #[test]
    fn product_normal_form() {
        let t = abc();
        let o = MonomialOrder::default_for(&t);
        let gb = buchberger(&[p("AB + C", &t), p("BC + 1", &t)], &o);
        let factors = [p("A + 1", &t), p("B", &t), p("C + A", &t)];
        let product = factors.iter().fold(BoolPoly::one(), |acc, f| acc.mul(f));
        assert_eq!(gb.normal_form_of_product(&factors), gb.normal_form(&product));
        assert_eq!(gb.normal_form_of_product(&[]), gb.normal_form(&BoolPoly::one()));
    }

    #[test]
    fn doc_round_trip() {
        let t = abc();
        let o = MonomialOrder::with_kind(OrderKind::DegRevLex, 3);
        let gb = buchberger(&[p("AB + A + C", &t)], &o);
        let doc = gb.to_doc(&t);
        let json = serde_json::to_string(&doc).unwrap();
        let (t2, gb2) = BasisDoc::from_json(&json).unwrap().to_basis().unwrap();
        assert_eq!(t2, t);
        assert_eq!(gb2, gb);

        let mut bad = doc.clone();
        bad.version = 9;
        let json = serde_json::to_string(&bad).unwrap();
        assert!(matches!(
            BasisDoc::from_json(&json),
            Err(DocError::Version { found: 9, .. })
        ));
    }
}
