//! The ideal of empty selection criteria and the ideal of accepted insights,
//! as persistent values with a lazily computed reduced basis.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::boolring::{format_poly, BoolPoly, MonomialOrder, OrderDoc, VariableDoc, VariableTable};
use crate::dataset::{build_sigma, PatternTable};
use crate::doc::{check_header, DocError};
use crate::gbasis::{buchberger, vanishing_basis, GroebnerBasis};

/// Generators plus a memoized reduced basis.
///
/// Clones share the memo, so the basis of a given value is computed at most
/// once no matter how many threads ask for it.
#[derive(Clone)]
pub struct Ideal {
    label: String,
    generators: Arc<Vec<BoolPoly>>,
    order: MonomialOrder,
    /// Polynomials generating the same ideal, used as Buchberger input.
    seed: Arc<Vec<BoolPoly>>,
    /// The variety, when known; the basis is then read off the points.
    points: Option<Arc<Vec<u64>>>,
    basis: Arc<OnceLock<GroebnerBasis>>,
}

impl Ideal {
    pub fn new(label: &str, generators: Vec<BoolPoly>, order: MonomialOrder) -> Self {
        let generators = Arc::new(generators);
        Self {
            label: label.to_string(),
            seed: generators.clone(),
            generators,
            order,
            points: None,
            basis: Arc::new(OnceLock::new()),
        }
    }

    /// Ideal generated by `generators` whose common zeros are exactly `points`.
    fn with_points(label: &str, generators: Vec<BoolPoly>, order: MonomialOrder, points: Vec<u64>) -> Self {
        let mut ideal = Self::new(label, generators, order);
        ideal.points = Some(Arc::new(points));
        ideal
    }

    /// Common zeros of the generators, if tracked.
    pub fn points(&self) -> Option<&[u64]> {
        self.points.as_deref().map(|v| v.as_slice())
    }

    pub fn zero(label: &str, order: MonomialOrder) -> Self {
        Self::new(label, Vec::new(), order)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generators(&self) -> &[BoolPoly] {
        &self.generators
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn basis(&self) -> &GroebnerBasis {
        self.basis.get_or_init(|| match &self.points {
            Some(points) => vanishing_basis(points, &self.order),
            None => buchberger(&self.seed, &self.order),
        })
    }

    pub fn is_basis_cached(&self) -> bool {
        self.basis.get().is_some()
    }

    pub fn contains(&self, p: &BoolPoly) -> bool {
        p.is_zero() || self.basis().contains(p)
    }

    pub fn is_unit(&self) -> bool {
        self.basis().is_unit()
    }

    /// New ideal with `polys` appended to the generators; `self` is unchanged.
    pub fn extend(&self, polys: &[BoolPoly]) -> Ideal {
        let mut generators = (*self.generators).clone();
        generators.extend(polys.iter().cloned());
        let seed = match self.basis.get() {
            Some(b) => {
                let mut s = b.elements().to_vec();
                s.extend(polys.iter().cloned());
                Arc::new(s)
            }
            None => {
                let mut s = (*self.seed).clone();
                s.extend(polys.iter().cloned());
                Arc::new(s)
            }
        };
        let points = self.points.as_ref().map(|pts| {
            Arc::new(
                pts.iter()
                    .copied()
                    .filter(|&x| polys.iter().all(|p| !p.eval_bits(x)))
                    .collect(),
            )
        });
        Ideal {
            label: self.label.clone(),
            generators: Arc::new(generators),
            order: self.order.clone(),
            seed,
            points,
            basis: Arc::new(OnceLock::new()),
        }
    }

    /// Normal form of each source polynomial, zeros kept in place.
    pub fn remainders(&self, source: &[BoolPoly]) -> Vec<BoolPoly> {
        let basis = self.basis();
        source.iter().map(|p| basis.normal_form(p)).collect()
    }

    pub fn to_doc(&self, table: &VariableTable) -> IdealDoc {
        let show = |ps: &[BoolPoly]| ps.iter().map(|p| format_poly(p, table)).collect();
        IdealDoc {
            format: IDEAL_FORMAT.to_string(),
            version: IDEAL_VERSION,
            label: self.label.clone(),
            variables: table.to_docs(),
            order: self.order.to_doc(table),
            generators: show(&self.generators),
            basis: show(self.basis().elements()),
        }
    }
}

impl std::fmt::Debug for Ideal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ideal")
            .field("label", &self.label)
            .field("generators", &self.generators.len())
            .field("cached", &self.is_basis_cached())
            .finish()
    }
}

/// The ideal 𝓘 generated by σ.
pub fn ideal_from_patterns(patterns: &PatternTable, order: &MonomialOrder) -> Ideal {
    let points = patterns.patterns().iter().map(|p| p.bits).collect();
    Ideal::with_points("I", vec![build_sigma(patterns)], order.clone(), points)
}

pub fn membership(p: &BoolPoly, ideal: &Ideal) -> bool {
    ideal.contains(p)
}

pub fn extend(ideal: &Ideal, polys: &[BoolPoly]) -> Ideal {
    ideal.extend(polys)
}

pub fn remainders_mod(source: &[BoolPoly], ideal: &Ideal) -> Vec<BoolPoly> {
    ideal.remainders(source)
}

pub const IDEAL_FORMAT: &str = "lad-ideal";
pub const IDEAL_VERSION: u32 = 1;

/// Snapshot of an ideal: generators, reduced basis and order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealDoc {
    pub format: String,
    pub version: u32,
    pub label: String,
    pub variables: Vec<VariableDoc>,
    pub order: OrderDoc,
    pub generators: Vec<String>,
    pub basis: Vec<String>,
}

impl IdealDoc {
    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let doc: IdealDoc = serde_json::from_str(text)?;
        check_header(&doc.format, doc.version, IDEAL_FORMAT, IDEAL_VERSION)?;
        Ok(doc)
    }

    /// Rebuilds the ideal with its basis pre-filled.
    pub fn to_ideal(&self) -> Result<(VariableTable, Ideal), DocError> {
        let table = VariableTable::from_docs(&self.variables)?;
        let order = self.order.to_order(&table)?;
        let parse = |ss: &[String]| {
            ss.iter()
                .map(|s| crate::boolring::parse_poly(s, &table))
                .collect::<Result<Vec<_>, _>>()
        };
        let ideal = Ideal::new(&self.label, parse(&self.generators)?, order.clone());
        let basis = GroebnerBasis::from_elements(&parse(&self.basis)?, order, true)?;
        let _ = ideal.basis.set(basis);
        Ok((table, ideal))
    }
}
