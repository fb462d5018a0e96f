//! Finite-dimensional graded commutative rings presented by a basis, a
//! Poincaré pairing and a symmetric triple-intersection tensor.
//!
//! The product is recovered from the defining relation
//! `<a ∪ b, c> = <a, b, c>`: for each pair `(a, b)` the coefficient row of
//! `a ∪ b` is the triple row `T(a, b, ·)` multiplied by the inverse pairing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalars::{GaussRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("pairing matrix is not invertible")]
    DegeneratePairing,
    #[error("grading violation at {at}: degrees sum to {sum}, top degree is {top}")]
    GradingViolation { at: String, sum: Rational, top: Rational },
    #[error("class {0} has degree {1}, expected {2}")]
    WrongDegree(String, Rational, Rational),
    #[error("products involving odd-degree class {0} are not supported")]
    OddDegreeUnsupported(String),
    #[error("pairing matrix is not symmetric")]
    NotSymmetric,
    #[error("pairing entry ({0}, {1}) is not real")]
    NonRealEntry(usize, usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("conflicting values for triple {0:?}: {1} vs {2}")]
    ConflictingEntry([usize; 3], GaussRational, GaussRational),
    #[error("duplicate basis name {0:?}")]
    DuplicateName(String),
    #[error("basis element {0:?} has negative degree")]
    NegativeDegree(String),
    #[error("unit element must be a degree-0 basis element")]
    InvalidUnit,
}

/// A named basis class with its (real) cohomological degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: Rational,
    /// Group element naming the twisted sector, if any.
    pub sector: Option<String>,
}

impl BasisElement {
    pub fn new(name: impl Into<String>, degree: impl Into<Rational>) -> Self {
        BasisElement {
            name: name.into(),
            degree: degree.into(),
            sector: None,
        }
    }

    pub fn with_sector(mut self, sector: impl Into<String>) -> Self {
        self.sector = Some(sector.into());
        self
    }

    /// True for odd integer degrees. Fractional degrees carry no sign rule
    /// and are treated as even.
    pub fn is_odd(&self) -> bool {
        self.degree
            .to_integer()
            .is_some_and(|d| num_integer::Integer::is_odd(&d))
    }
}

fn validate_basis(basis: &[BasisElement]) -> Result<(), AlgebraError> {
    let mut seen = BTreeSet::new();
    for b in basis {
        if !seen.insert(b.name.as_str()) {
            return Err(AlgebraError::DuplicateName(b.name.clone()));
        }
        if b.degree.is_negative() {
            return Err(AlgebraError::NegativeDegree(b.name.clone()));
        }
    }
    Ok(())
}

/// A symmetric bilinear pairing on the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingMatrix(Matrix);

impl PairingMatrix {
    pub fn new(matrix: Matrix) -> Result<Self, AlgebraError> {
        if !matrix.is_square() {
            return Err(AlgebraError::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        if !matrix.is_symmetric() {
            return Err(AlgebraError::NotSymmetric);
        }
        Ok(PairingMatrix(matrix))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussRational {
        self.0.get(i, j)
    }

    /// `<x, y>` for coefficient vectors.
    pub fn pair(&self, x: &[GaussRational], y: &[GaussRational]) -> GaussRational {
        let xp = self.0.left_apply(x);
        xp.iter().zip(y).map(|(a, b)| a * b).sum()
    }
}

/// A fully symmetric 3-tensor on basis indices, stored sparsely under
/// sorted index triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleTensor {
    dim: usize,
    top_degree: Option<Rational>,
    entries: BTreeMap<[usize; 3], GaussRational>,
}

fn sorted(mut idx: [usize; 3]) -> [usize; 3] {
    idx.sort_unstable();
    idx
}

impl TripleTensor {
    pub fn new(dim: usize, top_degree: Option<Rational>) -> Self {
        TripleTensor {
            dim,
            top_degree,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn top_degree(&self) -> Option<&Rational> {
        self.top_degree.as_ref()
    }

    /// Records `value` for `idx` and all its permutations. Re-inserting a
    /// triple with a different value is an error.
    pub fn insert(&mut self, idx: [usize; 3], value: GaussRational) -> Result<(), AlgebraError> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.dim) {
            return Err(AlgebraError::IndexOutOfRange(bad));
        }
        let key = sorted(idx);
        match self.entries.get(&key) {
            Some(old) if *old != value => Err(AlgebraError::ConflictingEntry(key, old.clone(), value)),
            Some(_) => Ok(()),
            None => {
                if !value.is_zero() {
                    self.entries.insert(key, value);
                }
                Ok(())
            }
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> GaussRational {
        self.entries
            .get(&sorted([i, j, k]))
            .cloned()
            .unwrap_or_default()
    }

    /// Nonzero entries under sorted keys, in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 3], &GaussRational)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entrywise sum; both tensors must have the same dimension.
    pub fn plus(&self, other: &TripleTensor) -> TripleTensor {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let sum = &out.get(k[0], k[1], k[2]) + v;
            if sum.is_zero() {
                out.entries.remove(k);
            } else {
                out.entries.insert(*k, sum);
            }
        }
        out
    }

    /// Checks that every nonzero entry sits in total degree `top_degree`.
    pub fn check_grading(&self, basis: &[BasisElement]) -> Result<(), AlgebraError> {
        let Some(top) = &self.top_degree else {
            return Ok(());
        };
        for key in self.entries.keys() {
            let sum = key
                .iter()
                .fold(Rational::zero(), |acc, &i| &acc + &basis[i].degree);
            if sum != *top {
                let at = format!(
                    "({}, {}, {})",
                    basis[key[0]].name, basis[key[1]].name, basis[key[2]].name
                );
                return Err(AlgebraError::GradingViolation {
                    at,
                    sum,
                    top: top.clone(),
                });
            }
        }
        Ok(())
    }
}

/// A violated ring identity found by [`GradedAlgebra::check_structure`] or
/// [`GradedAlgebra::check_associativity`]. Indices refer to the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `a ∪ b` has a nonzero component along `c` of the wrong degree.
    Degree { a: usize, b: usize, c: usize },
    NonCommutative { a: usize, b: usize },
    /// `1 ∪ a ≠ a` or `a ∪ 1 ≠ a`.
    UnitLaw { a: usize },
    /// `<a ∪ b, c>` differs from the stored triple value.
    PairingMismatch { a: usize, b: usize, c: usize },
    NonAssociative { a: usize, b: usize, c: usize },
}

impl Violation {
    pub fn describe(&self, basis: &[BasisElement]) -> String {
        let n = |i: &usize| basis[*i].name.as_str();
        match self {
            Violation::Degree { a, b, c } => {
                format!("deg({} ∪ {}) has a component along {} of the wrong degree", n(a), n(b), n(c))
            }
            Violation::NonCommutative { a, b } => format!("{} ∪ {} ≠ {} ∪ {}", n(a), n(b), n(b), n(a)),
            Violation::UnitLaw { a } => format!("unit law fails for {}", n(a)),
            Violation::PairingMismatch { a, b, c } => {
                format!("<{} ∪ {}, {}> differs from the triple value", n(a), n(b), n(c))
            }
            Violation::NonAssociative { a, b, c } => {
                format!("({0} ∪ {1}) ∪ {2} ≠ {0} ∪ ({1} ∪ {2})", n(a), n(b), n(c))
            }
        }
    }
}

/// A graded algebra with cached structure constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedAlgebra {
    basis: Vec<BasisElement>,
    unit: usize,
    pairing: Option<PairingMatrix>,
    triples: Option<TripleTensor>,
    /// `consts[(a * n + b) * n + c]` is the coefficient of `e_c` in `e_a ∪ e_b`.
    consts: Vec<GaussRational>,
}

/// Builds the ring whose product satisfies `<a ∪ b, c> = triples(a, b, c)`.
pub fn build_algebra(
    basis: Vec<BasisElement>,
    unit: usize,
    pairing: PairingMatrix,
    triples: TripleTensor,
) -> Result<GradedAlgebra, AlgebraError> {
    let n = basis.len();
    validate_basis(&basis)?;
    if unit >= n || !basis[unit].degree.is_zero() {
        return Err(AlgebraError::InvalidUnit);
    }
    for found in [pairing.dim(), triples.dim()] {
        if found != n {
            return Err(AlgebraError::DimensionMismatch { expected: n, found });
        }
    }
    if let Some(top) = triples.top_degree() {
        for i in 0..n {
            for j in i..n {
                let sum = &basis[i].degree + &basis[j].degree;
                if !pairing.get(i, j).is_zero() && sum != *top {
                    return Err(AlgebraError::GradingViolation {
                        at: format!("pairing ({}, {})", basis[i].name, basis[j].name),
                        sum,
                        top: top.clone(),
                    });
                }
            }
        }
    }
    triples.check_grading(&basis)?;
    for key in triples.entries.keys() {
        if let Some(&odd) = key.iter().find(|&&i| basis[i].is_odd()) {
            return Err(AlgebraError::OddDegreeUnsupported(basis[odd].name.clone()));
        }
    }
    let inv = pairing
        .matrix()
        .inverse()
        .ok_or(AlgebraError::DegeneratePairing)?;

    let mut consts = vec![GaussRational::zero(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            let row: Vec<GaussRational> = (0..n).map(|l| triples.get(a, b, l)).collect();
            if row.iter().all(GaussRational::is_zero) {
                continue;
            }
            for (c, v) in inv.left_apply(&row).into_iter().enumerate() {
                consts[(a * n + b) * n + c] = v;
            }
        }
    }
    Ok(GradedAlgebra {
        basis,
        unit,
        pairing: Some(pairing),
        triples: Some(triples),
        consts,
    })
}

impl GradedAlgebra {
    /// An algebra given directly by structure constants
    /// `consts[a][b][c]` = coefficient of `e_c` in `e_a ∪ e_b`. No symmetry
    /// is imposed; use [`check_structure`](Self::check_structure) to audit.
    pub fn from_structure_constants(
        basis: Vec<BasisElement>,
        unit: usize,
        consts: Vec<Vec<Vec<GaussRational>>>,
    ) -> Result<Self, AlgebraError> {
        let n = basis.len();
        validate_basis(&basis)?;
        if unit >= n || !basis[unit].degree.is_zero() {
            return Err(AlgebraError::InvalidUnit);
        }
        let mut flat = Vec::with_capacity(n * n * n);
        if consts.len() != n {
            return Err(AlgebraError::DimensionMismatch {
                expected: n,
                found: consts.len(),
            });
        }
        for plane in consts {
            if plane.len() != n {
                return Err(AlgebraError::DimensionMismatch {
                    expected: n,
                    found: plane.len(),
                });
            }
            for row in plane {
                if row.len() != n {
                    return Err(AlgebraError::DimensionMismatch {
                        expected: n,
                        found: row.len(),
                    });
                }
                flat.extend(row);
            }
        }
        Ok(GradedAlgebra {
            basis,
            unit,
            pairing: None,
            triples: None,
            consts: flat,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn pairing(&self) -> Option<&PairingMatrix> {
        self.pairing.as_ref()
    }

    pub fn triples(&self) -> Option<&TripleTensor> {
        self.triples.as_ref()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    /// Coefficients of `e_a ∪ e_b`.
    pub fn product(&self, a: usize, b: usize) -> &[GaussRational] {
        let n = self.dim();
        &self.consts[(a * n + b) * n..(a * n + b + 1) * n]
    }

    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> &GaussRational {
        &self.product(a, b)[c]
    }

    /// Product of two coefficient vectors.
    pub fn multiply(&self, x: &[GaussRational], y: &[GaussRational]) -> Vec<GaussRational> {
        let n = self.dim();
        let mut out = vec![GaussRational::zero(); n];
        for (a, xa) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (b, yb) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let f = xa * yb;
                for (o, c) in out.iter_mut().zip(self.product(a, b)) {
                    if !c.is_zero() {
                        *o += &(&f * c);
                    }
                }
            }
        }
        out
    }

    /// Coefficient vector of basis element `a`.
    pub fn unit_vector(&self, a: usize) -> Vec<GaussRational> {
        let mut v = vec![GaussRational::zero(); self.dim()];
        v[a] = GaussRational::one();
        v
    }

    /// Degree additivity, commutativity, the unit law and (when a pairing
    /// and triples are present) consistency of the product with them.
    pub fn check_structure(&self) -> Vec<Violation> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let expected = &self.basis[a].degree + &self.basis[b].degree;
                for (c, v) in self.product(a, b).iter().enumerate() {
                    if !v.is_zero() && self.basis[c].degree != expected {
                        out.push(Violation::Degree { a, b, c });
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if self.product(a, b) != self.product(b, a) {
                    out.push(Violation::NonCommutative { a, b });
                }
            }
        }
        for a in 0..n {
            let e = self.unit_vector(a);
            if self.product(self.unit, a) != e.as_slice() || self.product(a, self.unit) != e.as_slice() {
                out.push(Violation::UnitLaw { a });
            }
        }
        if let (Some(p), Some(t)) = (&self.pairing, &self.triples) {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.product(a, b);
                    for c in 0..n {
                        if p.pair(ab, &self.unit_vector(c)) != t.get(a, b, c) {
                            out.push(Violation::PairingMismatch { a, b, c });
                        }
                    }
                }
            }
        }
        out
    }

    /// Every basis triple with `(a ∪ b) ∪ c ≠ a ∪ (b ∪ c)`.
    pub fn check_associativity(&self) -> Vec<Violation> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let ab = self.product(a, b).to_vec();
                for c in 0..n {
                    let left = self.multiply(&ab, &self.unit_vector(c));
                    let right = self.multiply(&self.unit_vector(a), self.product(b, c));
                    if left != right {
                        out.push(Violation::NonAssociative { a, b, c });
                    }
                }
            }
        }
        out
    }
}

/// A symmetric trilinear form on a small basis, used where no global
/// pairing exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicForm {
    names: Vec<String>,
    values: BTreeMap<[usize; 3], GaussRational>,
}

impl CubicForm {
    pub fn new(names: Vec<String>) -> Self {
        CubicForm {
            names,
            values: BTreeMap::new(),
        }
    }

    pub fn from_tensor(names: Vec<String>, tensor: &TripleTensor) -> Result<Self, AlgebraError> {
        if tensor.dim() != names.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: names.len(),
                found: tensor.dim(),
            });
        }
        Ok(CubicForm {
            names,
            values: tensor.entries.clone(),
        })
    }

    pub fn set(&mut self, idx: [usize; 3], value: GaussRational) {
        let key = sorted(idx);
        if value.is_zero() {
            self.values.remove(&key);
        } else {
            self.values.insert(key, value);
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> GaussRational {
        self.values.get(&sorted([i, j, k])).cloned().unwrap_or_default()
    }

    /// Nonzero values under sorted index triples.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 3], &GaussRational)> {
        self.values.iter()
    }

    /// The graded Frobenius algebra of a threefold with this cubic form on
    /// `H²`: basis `1`, the degree-2 classes `x_i`, their duals `x_i*` in
    /// degree 4 and a point class in degree 6, with `x_i ∪ x_j = Σ F(i,j,k) x_k*`.
    pub fn frobenius_algebra(&self) -> Result<GradedAlgebra, AlgebraError> {
        let k = self.dim();
        let n = 2 * k + 2;
        let mut basis = vec![BasisElement::new("1", 0)];
        basis.extend(self.names.iter().map(|s| BasisElement::new(s.clone(), 2)));
        basis.extend(self.names.iter().map(|s| BasisElement::new(format!("{s}*"), 4)));
        basis.push(BasisElement::new("[pt]", 6));
        let mut pairing = Matrix::zeros(n, n);
        pairing.set(0, n - 1, GaussRational::one());
        pairing.set(n - 1, 0, GaussRational::one());
        for i in 0..k {
            pairing.set(1 + i, 1 + k + i, GaussRational::one());
            pairing.set(1 + k + i, 1 + i, GaussRational::one());
        }
        let mut triples = TripleTensor::new(n, Some(Rational::from(6)));
        for i in 0..n {
            for j in i..n {
                if !pairing.get(i, j).is_zero() {
                    triples.insert([0, i, j], GaussRational::one())?;
                }
            }
        }
        for (key, v) in &self.values {
            triples.insert([key[0] + 1, key[1] + 1, key[2] + 1], v.clone())?;
        }
        build_algebra(basis, 0, PairingMatrix::new(pairing)?, triples)
    }
}

/// Restricts `triples` to the degree-2 classes `sub_basis`.
pub fn cubic_form(
    basis: &[BasisElement],
    triples: &TripleTensor,
    sub_basis: &[usize],
) -> Result<CubicForm, AlgebraError> {
    let two = Rational::from(2);
    for &i in sub_basis {
        let b = basis.get(i).ok_or(AlgebraError::IndexOutOfRange(i))?;
        if b.degree != two {
            return Err(AlgebraError::WrongDegree(b.name.clone(), b.degree.clone(), two));
        }
    }
    let mut form = CubicForm::new(sub_basis.iter().map(|&i| basis[i].name.clone()).collect());
    for (x, &i) in sub_basis.iter().enumerate() {
        for (y, &j) in sub_basis.iter().enumerate().skip(x) {
            for (z, &k) in sub_basis.iter().enumerate().skip(y) {
                form.set([x, y, z], triples.get(i, j, k));
            }
        }
    }
    Ok(form)
}

/// Counts of positive, negative and zero squares of a real symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.positive, self.negative, self.zero)
    }
}

/// Inertia of a real symmetric matrix by congruence diagonalization over Q.
pub fn pairing_signature(pairing: &Matrix) -> Result<Inertia, AlgebraError> {
    let n = pairing.rows();
    if !pairing.is_symmetric() {
        return Err(AlgebraError::NotSymmetric);
    }
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let v = pairing.get(i, j);
            if !v.is_real() {
                return Err(AlgebraError::NonRealEntry(i, j));
            }
            row.push(v.re.clone());
        }
        a.push(row);
    }
    let mut inertia = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // row/col k += row/col j makes the pivot 2·a[k][j] ≠ 0
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[k][c] += &v;
                }
                for row in a.iter_mut() {
                    let v = row[j].clone();
                    row[k] += &v;
                }
            }
        }
        let pivot = a[k][k].clone();
        if pivot.is_zero() {
            inertia.zero += 1;
            continue;
        }
        if pivot.is_positive() {
            inertia.positive += 1;
        } else {
            inertia.negative += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].checked_div(&pivot).expect("nonzero pivot");
            for c in 0..n {
                let v = &f * &a[k][c];
                a[i][c] -= &v;
            }
            for row in a.iter_mut() {
                let v = &f * &row[k];
                row[i] -= &v;
            }
        }
    }
    Ok(inertia)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(s: &str) -> GaussRational {
        s.parse().unwrap()
    }

    fn unit_algebra() -> GradedAlgebra {
        let mut t = TripleTensor::new(1, None);
        t.insert([0, 0, 0], g("1")).unwrap();
        build_algebra(
            vec![BasisElement::new("1", 0)],
            0,
            PairingMatrix::new(Matrix::identity(1)).unwrap(),
            t,
        )
        .unwrap()
    }

    #[test]
    fn unit_algebra_product() {
        let a = unit_algebra();
        assert_eq!(a.product(0, 0), &[g("1")]);
        assert!(a.check_structure().is_empty());
        assert!(a.check_associativity().is_empty());
    }

    #[test]
    fn degenerate_pairing_is_rejected() {
        let basis = vec![BasisElement::new("1", 0), BasisElement::new("x", 2)];
        let mut p = Matrix::zeros(2, 2);
        p.set(0, 0, g("1"));
        let err = build_algebra(basis, 0, PairingMatrix::new(p).unwrap(), TripleTensor::new(2, None));
        assert_eq!(err.unwrap_err(), AlgebraError::DegeneratePairing);
    }

    #[test]
    fn grading_and_odd_degree_errors() {
        let basis = vec![BasisElement::new("1", 0), BasisElement::new("x", 2)];
        let mut p = Matrix::zeros(2, 2);
        p.set(0, 1, g("1"));
        p.set(1, 0, g("1"));
        let mut t = TripleTensor::new(2, Some(Rational::from(2)));
        t.insert([0, 0, 1], g("1")).unwrap();
        t.insert([1, 1, 1], g("5")).unwrap();
        let err = build_algebra(basis, 0, PairingMatrix::new(p.clone()).unwrap(), t).unwrap_err();
        assert!(matches!(err, AlgebraError::GradingViolation { .. }));

        let basis = vec![BasisElement::new("1", 0), BasisElement::new("y", 1)];
        let mut t = TripleTensor::new(2, None);
        t.insert([0, 0, 1], g("1")).unwrap();
        let err = build_algebra(basis, 0, PairingMatrix::new(p).unwrap(), t).unwrap_err();
        assert_eq!(err, AlgebraError::OddDegreeUnsupported("y".into()));
    }

    #[test]
    fn conflicting_triple_values() {
        let mut t = TripleTensor::new(3, None);
        t.insert([0, 1, 2], g("1")).unwrap();
        t.insert([2, 0, 1], g("1")).unwrap();
        assert!(matches!(t.insert([1, 2, 0], g("2")), Err(AlgebraError::ConflictingEntry(..))));
        assert_eq!(t.get(2, 1, 0), g("1"));
    }

    /// `H*(P^2)`: 1, h, h² with ∫h² = 1.
    fn projective_plane() -> GradedAlgebra {
        let basis = vec![
            BasisElement::new("1", 0),
            BasisElement::new("h", 2),
            BasisElement::new("p", 4),
        ];
        let mut p = Matrix::zeros(3, 3);
        p.set(0, 2, g("1"));
        p.set(2, 0, g("1"));
        p.set(1, 1, g("1"));
        let mut t = TripleTensor::new(3, Some(Rational::from(4)));
        t.insert([0, 0, 2], g("1")).unwrap();
        t.insert([0, 1, 1], g("1")).unwrap();
        build_algebra(basis, 0, PairingMatrix::new(p).unwrap(), t).unwrap()
    }

    #[test]
    fn projective_plane_ring() {
        let a = projective_plane();
        assert_eq!(a.product(1, 1), &[g("0"), g("0"), g("1")]);
        assert_eq!(a.product(1, 2), &[g("0"), g("0"), g("0")]);
        assert!(a.check_structure().is_empty());
        assert!(a.check_associativity().is_empty());
    }

    #[test]
    fn one_asymmetric_entry_is_reported_once() {
        // 1, x, y in degree 2, p in degree 4; every product of x, y is p.
        let basis = vec![
            BasisElement::new("1", 0),
            BasisElement::new("x", 2),
            BasisElement::new("y", 2),
            BasisElement::new("p", 4),
        ];
        let z = || vec![g("0"); 4];
        let e = |i: usize| {
            let mut v = z();
            v[i] = g("1");
            v
        };
        let mut c: Vec<Vec<Vec<GaussRational>>> = vec![vec![z(); 4]; 4];
        for i in 0..4 {
            c[0][i] = e(i);
            c[i][0] = e(i);
        }
        c[1][1] = e(3);
        c[2][2] = e(3);
        c[1][2] = e(3);
        c[2][1] = e(3);
        let clean = GradedAlgebra::from_structure_constants(basis.clone(), 0, c.clone()).unwrap();
        assert!(clean.check_structure().is_empty());
        c[2][1][3] = g("2");
        let bad = GradedAlgebra::from_structure_constants(basis, 0, c).unwrap();
        let report = bad.check_structure();
        assert_eq!(report, vec![Violation::NonCommutative { a: 1, b: 2 }]);
    }

    #[test]
    fn random_structure_constants_are_not_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 4;
        let basis: Vec<_> = (0..n).map(|i| BasisElement::new(format!("e{i}"), 0)).collect();
        let consts: Vec<Vec<Vec<GaussRational>>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| (0..n).map(|_| GaussRational::from_int(rng.gen_range(-3..=3))).collect())
                    .collect()
            })
            .collect();
        let a = GradedAlgebra::from_structure_constants(basis, 0, consts.clone()).unwrap();
        let report = a.check_associativity();
        assert!(!report.is_empty());
        // Oracle: expand (e_a e_b) e_c and e_a (e_b e_c) directly.
        let mut expected = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for w in 0..n {
                    let left: Vec<GaussRational> = (0..n)
                        .map(|t| (0..n).map(|m| &consts[x][y][m] * &consts[m][w][t]).sum())
                        .collect();
                    let right: Vec<GaussRational> = (0..n)
                        .map(|t| (0..n).map(|m| &consts[y][w][m] * &consts[x][m][t]).sum())
                        .collect();
                    if left != right {
                        expected.push(Violation::NonAssociative { a: x, b: y, c: w });
                    }
                }
            }
        }
        assert_eq!(report, expected);
        assert_eq!(a.check_associativity(), report);
    }

    #[test]
    fn cubic_form_extraction() {
        let basis = vec![BasisElement::new("a", 2), BasisElement::new("b", 2), BasisElement::new("p", 4)];
        let mut t = TripleTensor::new(3, None);
        t.insert([0, 1, 1], g("1/2")).unwrap();
        let f = cubic_form(&basis, &t, &[0, 1]).unwrap();
        assert_eq!(f.get(1, 0, 1), g("1/2"));
        assert_eq!(f.get(0, 0, 0), g("0"));
        assert_eq!(f.get(1, 1, 1), g("0"));
        assert!(cubic_form(&basis, &t, &[]).unwrap().entries().next().is_none());
        assert!(matches!(cubic_form(&basis, &t, &[2]), Err(AlgebraError::WrongDegree(..))));
    }

    #[test]
    fn frobenius_algebra_of_a_cubic_form_is_associative() {
        let mut f = CubicForm::new(vec!["a".into(), "b".into()]);
        f.set([0, 1, 1], g("-2"));
        f.set([1, 1, 1], g("7"));
        let alg = f.frobenius_algebra().unwrap();
        assert!(alg.check_structure().is_empty());
        assert!(alg.check_associativity().is_empty());
        // b ∪ b = F(b,b,a) a* + F(b,b,b) b*
        assert_eq!(alg.product(2, 2), &[g("0"), g("0"), g("0"), g("-2"), g("7"), g("0")]);
    }

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| GaussRational::from_int(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn signature_examples() {
        let s = |m: &Matrix| pairing_signature(m).unwrap();
        assert_eq!(s(&Matrix::identity(2)), Inertia { positive: 2, negative: 0, zero: 0 });
        assert_eq!(s(&mat(&[&[0, 1], &[1, 0]])), Inertia { positive: 1, negative: 1, zero: 0 });
        assert_eq!(s(&Matrix::zeros(3, 3)), Inertia { positive: 0, negative: 0, zero: 3 });
        assert_eq!(s(&mat(&[&[-2, 1], &[1, -2]])), Inertia { positive: 0, negative: 2, zero: 0 });
        assert_eq!(s(&mat(&[&[0, 0, 1], &[0, 0, 0], &[1, 0, 0]])), Inertia { positive: 1, negative: 1, zero: 1 });
        let mut c = Matrix::identity(2);
        c.set(0, 1, g("i"));
        c.set(1, 0, g("i"));
        assert_eq!(pairing_signature(&c), Err(AlgebraError::NonRealEntry(0, 1)));
    }

    proptest! {
        #[test]
        fn signature_invariant_under_permutation(
            entries in proptest::collection::vec(-3i64..=3, 10),
            perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let mut m = Matrix::zeros(4, 4);
            let mut it = entries.into_iter();
            for i in 0..4 {
                for j in i..4 {
                    let v = GaussRational::from_int(it.next().unwrap());
                    m.set(i, j, v.clone());
                    m.set(j, i, v);
                }
            }
            let p = Matrix::from_fn(4, 4, |i, j| GaussRational::from_int((perm[i] == j) as i64));
            let pm = p.mul(&m).unwrap().mul(&p.transpose()).unwrap();
            let s = pairing_signature(&m).unwrap();
            prop_assert_eq!(s, pairing_signature(&pm).unwrap());
            prop_assert_eq!(s.positive + s.negative + s.zero, 4);
            prop_assert_eq!(s.positive + s.negative, m.rank());
        }

        #[test]
        fn triple_tensor_is_symmetric(i in 0usize..5, j in 0usize..5, k in 0usize..5, v in -9i64..9) {
            let mut t = TripleTensor::new(5, None);
            t.insert([i, j, k], GaussRational::from_int(v)).unwrap();
            let perms = [[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]];
            for p in perms {
                prop_assert_eq!(t.get(p[0], p[1], p[2]), GaussRational::from_int(v));
            }
        }

        #[test]
        fn build_roundtrips_triples(vals in proptest::collection::vec(-5i64..=5, 4), hh in 1i64..4) {
            // ring on 1, x, y (deg 2), p (deg 4) with pairing 1-p, and x,y
            // paired by [[hh,1],[1,0]]; cubic terms (x,x,?) and (x,y,?) land
            // on the unit slot by grading, so vary the degree-2 pairing.
            let basis = vec![
                BasisElement::new("1", 0),
                BasisElement::new("x", 2),
                BasisElement::new("y", 2),
                BasisElement::new("p", 4),
            ];
            let gp = [[hh, vals[0]], [vals[0], vals[1] + 7]];
            prop_assume!(gp[0][0] * gp[1][1] - gp[0][1] * gp[1][0] != 0);
            let mut p = Matrix::zeros(4, 4);
            p.set(0, 3, GaussRational::one());
            p.set(3, 0, GaussRational::one());
            let mut t = TripleTensor::new(4, Some(Rational::from(4)));
            t.insert([0, 0, 3], GaussRational::one()).unwrap();
            for (x, row) in gp.iter().enumerate() {
                for (y, v) in row.iter().enumerate() {
                    p.set(1 + x, 1 + y, GaussRational::from_int(*v));
                    t.insert([0, 1 + x, 1 + y], GaussRational::from_int(*v)).unwrap();
                }
            }
            let alg = build_algebra(basis, 0, PairingMatrix::new(p).unwrap(), t.clone()).unwrap();
            let pairing = alg.pairing().unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        prop_assert_eq!(pairing.pair(alg.product(a, b), &alg.unit_vector(c)), t.get(a, b, c));
                    }
                }
            }
            prop_assert!(alg.check_structure().is_empty());
            prop_assert_eq!(alg.check_structure(), alg.check_structure());
        }
    }
}
