//! Quantum corrections from extremal rational curves.
//!
//! A three-point series `Σ_A Ψ_A(α, β, γ) q^A` over multi-degrees along the
//! extremal rays is stored as finitely many explicit terms plus geometric
//! tails `Σ_{d ≥ d₀} c q_r^d` along single rays. Tails are summed in closed
//! form `c q_r^{d₀} / (1 − q_r)`, which makes sense at `q_r = −1` and has a
//! pole at `q_r = 1`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{build_algebra, AlgebraError, BasisElement, GradedAlgebra, PairingMatrix, TripleTensor};
use crate::scalars::{GaussRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrectionError {
    #[error("tail along ray {ray} has a pole at q = 1")]
    PoleAtOne { ray: String },
    #[error("extremal rays are not declared nondegenerate; the corrected product is undefined")]
    DegenerateRays,
    #[error("invalid ray set: {0}")]
    InvalidRays(String),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalRaySet {
    names: Vec<String>,
    nondegenerate: bool,
}

impl ExtremalRaySet {
    pub fn new(names: Vec<String>, nondegenerate: bool) -> Result<Self, CorrectionError> {
        if names.is_empty() {
            return Err(CorrectionError::InvalidRays("at least one ray is required".into()));
        }
        if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
            return Err(CorrectionError::InvalidRays("ray names must be unique".into()));
        }
        Ok(ExtremalRaySet { names, nondegenerate })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.nondegenerate
    }
}

/// `Σ_{d ≥ from} value · q_ray^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tail {
    pub ray: usize,
    pub from: u32,
    pub value: GaussRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GwSeries {
    triple: [usize; 3],
    terms: Vec<(Vec<u32>, GaussRational)>,
    tails: Vec<Tail>,
}

impl GwSeries {
    /// `rays` is the number of extremal rays; every multi-degree has that
    /// many entries.
    pub fn new(
        triple: [usize; 3],
        rays: usize,
        terms: Vec<(Vec<u32>, GaussRational)>,
        tails: Vec<Tail>,
    ) -> Result<Self, CorrectionError> {
        let bad = |m: String| Err(CorrectionError::InvalidSeries(m));
        let mut seen = BTreeSet::new();
        for (deg, _) in &terms {
            if deg.len() != rays {
                return bad(format!("degree {deg:?} must have {rays} entries"));
            }
            if deg.iter().all(|&a| a == 0) {
                return bad("the zero degree is not a curve class".into());
            }
            if !seen.insert(deg.clone()) {
                return bad(format!("degree {deg:?} listed twice"));
            }
        }
        let mut tail_rays = BTreeSet::new();
        for t in &tails {
            if t.ray >= rays {
                return bad(format!("tail ray index {} out of range", t.ray));
            }
            if t.from == 0 {
                return bad("tails start at degree 1 or higher".into());
            }
            if !tail_rays.insert(t.ray) {
                return bad(format!("two tails along ray {}", t.ray));
            }
            let overlap = terms.iter().find(|(deg, _)| {
                deg.iter().enumerate().all(|(r, &a)| if r == t.ray { a >= t.from } else { a == 0 })
            });
            if let Some((deg, _)) = overlap {
                return bad(format!("term {deg:?} overlaps the tail along ray {}", t.ray));
            }
        }
        Ok(GwSeries { triple, terms, tails })
    }

    pub fn triple(&self) -> [usize; 3] {
        self.triple
    }

    pub fn terms(&self) -> &[(Vec<u32>, GaussRational)] {
        &self.terms
    }

    pub fn tails(&self) -> &[Tail] {
        &self.tails
    }
}

/// Values of the Novikov variables, one per ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoint(pub Vec<GaussRational>);

impl QPoint {
    pub fn minus_one(rays: usize) -> Self {
        QPoint(vec![GaussRational::from_int(-1); rays])
    }

    pub fn constant(rays: usize, q: GaussRational) -> Self {
        QPoint(vec![q; rays])
    }
}

/// Exact value of `s` at `q`: finite terms first, then tails in order.
pub fn evaluate_series(s: &GwSeries, q: &QPoint, rays: &ExtremalRaySet) -> Result<GaussRational, CorrectionError> {
    if q.0.len() != rays.len() {
        return Err(CorrectionError::InvalidSeries(format!(
            "q has {} coordinates for {} rays",
            q.0.len(),
            rays.len()
        )));
    }
    let mut acc = GaussRational::zero();
    for (deg, value) in &s.terms {
        let mut m = value.clone();
        for (qr, &a) in q.0.iter().zip(deg) {
            m = &m * &qr.pow(a as i64).expect("non-negative power");
        }
        acc += &m;
    }
    for t in &s.tails {
        let qr = &q.0[t.ray];
        let denom = &GaussRational::one() - qr;
        if denom.is_zero() {
            return Err(CorrectionError::PoleAtOne {
                ray: rays.names[t.ray].clone(),
            });
        }
        let num = &t.value * &qr.pow(t.from as i64).expect("non-negative power");
        acc += &num.checked_div(&denom).expect("nonzero denominator");
    }
    Ok(acc)
}

/// Assembles `<α, β, γ>_qc` at `q = (−1, …, −1)` for all basis triples.
pub fn qc_triple_tensor(
    series: &[GwSeries],
    rays: &ExtremalRaySet,
    basis: &[BasisElement],
    top_degree: Option<Rational>,
) -> Result<TripleTensor, CorrectionError> {
    if !rays.is_nondegenerate() {
        return Err(CorrectionError::DegenerateRays);
    }
    let n = basis.len();
    let q = QPoint::minus_one(rays.len());
    let mut out = TripleTensor::new(n, top_degree);
    let mut seen = BTreeSet::new();
    for s in series {
        let mut key = s.triple;
        if let Some(&bad) = key.iter().find(|&&i| i >= n) {
            return Err(CorrectionError::BasisMismatch(format!("series index {bad} outside a basis of {n}")));
        }
        key.sort_unstable();
        if !seen.insert(key) {
            let names: Vec<&str> = key.iter().map(|&i| basis[i].name.as_str()).collect();
            return Err(CorrectionError::InvalidSeries(format!("two series for the triple {names:?}")));
        }
        out.insert(key, evaluate_series(s, &q, rays)?)?;
    }
    Ok(out)
}

/// `<α, β, γ>_π = <α, β, γ> + <α, β, γ>_qc`.
pub fn corrected_triples(classical: &TripleTensor, qc: &TripleTensor) -> Result<TripleTensor, CorrectionError> {
    if classical.dim() != qc.dim() {
        return Err(CorrectionError::BasisMismatch(format!(
            "dimensions {} and {}",
            classical.dim(),
            qc.dim()
        )));
    }
    if classical.top_degree() != qc.top_degree() {
        return Err(CorrectionError::BasisMismatch("top degrees differ".into()));
    }
    Ok(classical.plus(qc))
}

/// The ring with `<α ∪_π β, γ> = <α, β, γ>_π`.
pub fn corrected_product(
    corrected: TripleTensor,
    pairing: PairingMatrix,
    basis: Vec<BasisElement>,
    unit: usize,
) -> Result<GradedAlgebra, CorrectionError> {
    Ok(build_algebra(basis, unit, pairing, corrected)?)
}
