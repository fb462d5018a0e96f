//! Orbifold sector bookkeeping for global quotients.
//!
//! Twisted sectors are indexed by conjugacy classes of a finite group given
//! by its multiplication table. Each class carries a degree-shifting number
//! `ι`. A [`SectorAlgebra`] splits a total product into components indexed
//! by the classes of the two factors and of the product; the sign twist
//! `(-1)^ε` with `ε(h₁, h₂) = (ι(h₁) + ι(h₂) − ι(h₁h₂)) / 2` acts
//! componentwise, and the diagonal map `α ↦ i^{ι(g)} α` intertwines the
//! twisted and untwisted products whenever all `ι` are integers.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algebra::{AlgebraError, BasisElement, GradedAlgebra};
use crate::iso::DiagonalMap;
use crate::linalg::Matrix;
use crate::scalars::{i_pow, GaussRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SectorError {
    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),
    #[error("exponent {0} is outside [0, 1)")]
    ExponentOutOfRange(Rational),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("sign exponent ε = {epsilon} for sectors ({h1}, {h2}) is not an integer")]
    NonIntegerSignExponent { h1: String, h2: String, epsilon: Rational },
    #[error("degree-shifting number {iota} of sector {class} is not an integer")]
    NonIntegerIota { class: String, iota: Rational },
    #[error("invalid degree-shifting numbers: {0}")]
    InvalidIota(String),
    #[error("not an involution: {0}")]
    NotAnInvolution(String),
    #[error("sector mismatch: {0}")]
    SectorMismatch(String),
    #[error("matrix is not hermitian")]
    NotHermitian,
    #[error("unknown group element {0:?}")]
    UnknownElement(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A conjugacy class, listed by element indices in increasing order; the
/// first element is the representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub elements: Vec<usize>,
    pub centralizer_order: usize,
}

impl ConjugacyClass {
    pub fn representative(&self) -> usize {
        self.elements[0]
    }
}

/// A finite group presented by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    classes: Vec<ConjugacyClass>,
    class_of: Vec<usize>,
}

impl GroupSpec {
    /// Validates that `table[a][b] = a·b` is a group law.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, SectorError> {
        let n = names.len();
        let bad = |m: String| SectorError::InvalidGroupTable(m);
        if n == 0 {
            return Err(bad("empty group".into()));
        }
        if names.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(bad("duplicate element names".into()));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(bad(format!("table must be {n}×{n}")));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(bad("table entry out of range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| bad("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(bad(format!(
                            "not associative at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| bad(format!("{} has no inverse", names[a])))?;
            inverse.push(inv);
        }
        let mut g = GroupSpec {
            names,
            table,
            identity,
            inverse,
            classes: Vec::new(),
            class_of: vec![usize::MAX; n],
        };
        g.classes = g.compute_classes();
        for (ci, class) in g.classes.iter().enumerate() {
            for &e in &class.elements {
                g.class_of[e] = ci;
            }
        }
        Ok(g)
    }

    /// The cyclic group `Z_n` with elements named `e, g, g2, …`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n)
            .map(|k| match k {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{k}"),
            })
            .collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(names, table).expect("cyclic group table is valid")
    }

    /// The symmetric group `S_n`, elements in lexicographic order of their
    /// one-line notation (`"123"` is the identity for `n = 3`).
    pub fn symmetric(n: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..n {
            perms = perms
                .into_iter()
                .flat_map(|p| {
                    (0..n)
                        .filter(|x| !p.contains(x))
                        .map(|x| {
                            let mut q = p.clone();
                            q.push(x);
                            q
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        let index: BTreeMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        // (σ·τ)(x) = σ(τ(x))
        let table = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| index[&t.iter().map(|&x| s[x]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .map(|p| p.iter().map(|x| (x + 1).to_string()).collect::<String>())
            .collect();
        Self::new(names, table).expect("symmetric group table is valid")
    }

    fn compute_classes(&self) -> Vec<ConjugacyClass> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for a in 0..n {
            if seen[a] {
                continue;
            }
            let members: BTreeSet<usize> = (0..n).map(|g| self.mul(self.mul(g, a), self.inverse[g])).collect();
            for &m in &members {
                seen[m] = true;
            }
            let centralizer_order = (0..n).filter(|&g| self.mul(g, a) == self.mul(a, g)).count();
            classes.push(ConjugacyClass {
                elements: members.into_iter().collect(),
                centralizer_order,
            });
        }
        classes
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, SectorError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| SectorError::UnknownElement(name.to_string()))
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    /// Name of a class: the name of its representative.
    pub fn class_name(&self, class: usize) -> &str {
        &self.names[self.classes[class].representative()]
    }

    /// Classes `(h₁h₂)` reachable with `h₁ ∈ c1`, `h₂ ∈ c2`.
    pub fn product_classes(&self, c1: usize, c2: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &a in &self.classes[c1].elements {
            for &b in &self.classes[c2].elements {
                out.insert(self.class_of(self.mul(a, b)));
            }
        }
        out
    }
}

/// Conjugacy classes of `group`, ordered by their smallest element.
pub fn conjugacy_classes(group: &GroupSpec) -> Vec<ConjugacyClass> {
    group.classes().to_vec()
}

/// Degree-shifting number of a local action with eigenvalue exponents
/// `a_j / m ∈ [0, 1)`: the sum of the exponents.
pub fn age(exponents: &[Rational]) -> Result<Rational, SectorError> {
    let one = Rational::one();
    exponents.iter().try_fold(Rational::zero(), |acc, e| {
        if e.is_negative() || *e >= one {
            Err(SectorError::ExponentOutOfRange(e.clone()))
        } else {
            Ok(&acc + e)
        }
    })
}

/// Degree-shifting number of a permutation of cycle type `cycle_type`
/// acting on `(C^d)^n`: `(d/2)·(n − ℓ)` where `ℓ` is the number of cycles.
pub fn perm_degree_shift(cycle_type: &[usize], d: usize) -> Result<Rational, SectorError> {
    if cycle_type.is_empty() {
        return Err(SectorError::InvalidPartition("empty cycle type".into()));
    }
    if cycle_type.contains(&0) {
        return Err(SectorError::InvalidPartition("cycle lengths must be positive".into()));
    }
    if d == 0 {
        return Err(SectorError::InvalidPartition("fiber dimension must be positive".into()));
    }
    let n: usize = cycle_type.iter().sum();
    let moved = (n - cycle_type.len()) as i64;
    Ok(Rational::frac(d as i64 * moved, 2))
}

/// `ε = (ι₁ + ι₂ − ι₁₂) / 2`.
pub fn epsilon_sign(iota1: &Rational, iota2: &Rational, iota12: &Rational) -> Rational {
    &(&(iota1 + iota2) - iota12) * &Rational::frac(1, 2)
}

/// A sector: conjugacy class and its degree-shifting number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorLabel {
    pub class: usize,
    pub iota: Rational,
}

/// Validates a per-class `ι` table: non-negative, zero on the identity.
pub fn validate_iota(group: &GroupSpec, iota: &[Rational]) -> Result<(), SectorError> {
    if iota.len() != group.classes().len() {
        return Err(SectorError::InvalidIota(format!(
            "expected {} values, found {}",
            group.classes().len(),
            iota.len()
        )));
    }
    if let Some(v) = iota.iter().find(|v| v.is_negative()) {
        return Err(SectorError::InvalidIota(format!("negative value {v}")));
    }
    if !iota[group.class_of(group.identity())].is_zero() {
        return Err(SectorError::InvalidIota("identity sector must have ι = 0".into()));
    }
    Ok(())
}

/// Key of a product component: classes of the two factors and of the product.
pub type ComponentKey = (usize, usize, usize);

/// A graded algebra whose basis is labelled by sectors, with its product
/// split into sector components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorAlgebra {
    algebra: GradedAlgebra,
    group: GroupSpec,
    iota: Vec<Rational>,
    labels: Vec<usize>,
    /// Structure constants `(a, b, c) ↦ coefficient of e_c in e_a ∪ e_b`,
    /// grouped by component.
    components: BTreeMap<ComponentKey, BTreeMap<(usize, usize, usize), GaussRational>>,
}

impl SectorAlgebra {
    /// Splits the product of `algebra` by sector. `labels[a]` is the class of
    /// basis element `a`.
    pub fn new(
        algebra: GradedAlgebra,
        group: GroupSpec,
        iota: Vec<Rational>,
        labels: Vec<usize>,
    ) -> Result<Self, SectorError> {
        validate_iota(&group, &iota)?;
        let n = algebra.dim();
        if labels.len() != n || labels.iter().any(|&c| c >= group.classes().len()) {
            return Err(SectorError::SectorMismatch("one sector label per basis element required".into()));
        }
        let mut components: BTreeMap<ComponentKey, BTreeMap<_, _>> = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                for (c, v) in algebra.product(a, b).iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let key = (labels[a], labels[b], labels[c]);
                    if !group.product_classes(key.0, key.1).contains(&key.2) {
                        let names = algebra.basis();
                        return Err(SectorError::SectorMismatch(format!(
                            "{} ∪ {} has a component along {} in sector ({}), which is not a product of ({}) and ({})",
                            names[a].name,
                            names[b].name,
                            names[c].name,
                            group.class_name(key.2),
                            group.class_name(key.0),
                            group.class_name(key.1),
                        )));
                    }
                    components.entry(key).or_default().insert((a, b, c), v.clone());
                }
            }
        }
        Ok(SectorAlgebra {
            algebra,
            group,
            iota,
            labels,
            components,
        })
    }

    /// Reads sector labels from the basis: `sector` names a group element,
    /// and a missing sector means the untwisted one.
    pub fn from_basis_sectors(algebra: GradedAlgebra, group: GroupSpec, iota: Vec<Rational>) -> Result<Self, SectorError> {
        let labels = sector_labels(algebra.basis(), &group)?;
        Self::new(algebra, group, iota, labels)
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn iota(&self) -> &[Rational] {
        &self.iota
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> SectorLabel {
        SectorLabel {
            class: self.labels[a],
            iota: self.iota[self.labels[a]].clone(),
        }
    }

    pub fn component_keys(&self) -> impl Iterator<Item = &ComponentKey> {
        self.components.keys()
    }

    /// Structure constants of one component.
    pub fn component(&self, key: &ComponentKey) -> Option<&BTreeMap<(usize, usize, usize), GaussRational>> {
        self.components.get(key)
    }

    /// `ε` of a component key.
    pub fn epsilon(&self, key: &ComponentKey) -> Rational {
        epsilon_sign(&self.iota[key.0], &self.iota[key.1], &self.iota[key.2])
    }

    /// The product obtained by summing all components.
    pub fn total_constants(&self) -> Vec<Vec<Vec<GaussRational>>> {
        let n = self.algebra.dim();
        let mut out = vec![vec![vec![GaussRational::zero(); n]; n]; n];
        for comp in self.components.values() {
            for (&(a, b, c), v) in comp {
                out[a][b][c] += v;
            }
        }
        out
    }
}

/// Class index of each basis element's sector.
pub fn sector_labels(basis: &[BasisElement], group: &GroupSpec) -> Result<Vec<usize>, SectorError> {
    basis
        .iter()
        .map(|b| match &b.sector {
            Some(s) => Ok(group.class_of(group.index_of(s)?)),
            None => Ok(group.class_of(group.identity())),
        })
        .collect()
}

/// Scales each component by `(-1)^ε`. Requires every `ε` to be an integer.
pub fn signed_product(sa: &SectorAlgebra) -> Result<SectorAlgebra, SectorError> {
    let mut components = BTreeMap::new();
    for (key, comp) in &sa.components {
        let eps = sa.epsilon(key);
        let Some(e) = eps.to_integer() else {
            return Err(SectorError::NonIntegerSignExponent {
                h1: sa.group.class_name(key.0).to_string(),
                h2: sa.group.class_name(key.1).to_string(),
                epsilon: eps,
            });
        };
        let negate = num_integer::Integer::is_odd(&e);
        let scaled = comp
            .iter()
            .map(|(k, v)| (*k, if negate { -v } else { v.clone() }))
            .collect();
        components.insert(*key, scaled);
    }
    let mut out = SectorAlgebra {
        algebra: sa.algebra.clone(),
        group: sa.group.clone(),
        iota: sa.iota.clone(),
        labels: sa.labels.clone(),
        components,
    };
    out.algebra = GradedAlgebra::from_structure_constants(
        sa.algebra.basis().to_vec(),
        sa.algebra.unit(),
        out.total_constants(),
    )?;
    Ok(out)
}

/// The diagonal map `α ↦ i^{ι(g)} α` for `α` in sector `(g)`.
pub fn qinwang_map(sa: &SectorAlgebra) -> Result<DiagonalMap, SectorError> {
    let scalars = (0..sa.algebra.dim())
        .map(|a| {
            let class = sa.labels[a];
            let iota = &sa.iota[class];
            iota.to_i64().map(i_pow).ok_or_else(|| SectorError::NonIntegerIota {
                class: sa.group.class_name(class).to_string(),
                iota: iota.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DiagonalMap::new(scalars).expect("powers of i are nonzero"))
}

/// A square matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianMatrix(Matrix);

impl HermitianMatrix {
    pub fn new(m: Matrix) -> Result<Self, SectorError> {
        if m.is_hermitian() {
            Ok(HermitianMatrix(m))
        } else {
            Err(SectorError::NotHermitian)
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    /// `<<x, y>> = Σ x_a G[a][b] conj(y_b)`.
    pub fn form(&self, x: &[GaussRational], y: &[GaussRational]) -> GaussRational {
        let xg = self.0.left_apply(x);
        xg.iter().zip(y).map(|(a, b)| a * &b.conj()).sum()
    }

    /// Leading-principal-minor test; every minor of a hermitian matrix is real.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.0.rows()).all(|k| {
            let det = self.0.leading(k).determinant().expect("square");
            debug_assert!(det.is_real());
            det.re.is_positive()
        })
    }
}

/// Exact positive-definiteness of a hermitian matrix.
pub fn is_positive_definite(g: &Matrix) -> Result<bool, SectorError> {
    Ok(HermitianMatrix::new(g.clone())?.is_positive_definite())
}

/// Gram matrix of `<<a, b>> = <a, I(b)>`, where `involution` is a basis
/// permutation sending sector `(g)` to `(g⁻¹)`. Basis vectors are real, so
/// conjugation only affects coefficient data when the form is evaluated.
pub fn hermitian_gram(
    pairing: &Matrix,
    basis: &[BasisElement],
    involution: &[usize],
    group: Option<&GroupSpec>,
) -> Result<HermitianMatrix, SectorError> {
    let n = basis.len();
    if pairing.rows() != n || pairing.cols() != n || involution.len() != n {
        return Err(SectorError::NotAnInvolution("size does not match the basis".into()));
    }
    if let Some(&bad) = involution.iter().find(|&&j| j >= n) {
        return Err(SectorError::NotAnInvolution(format!("index {bad} out of range")));
    }
    for (a, &b) in involution.iter().enumerate() {
        if involution[b] != a {
            return Err(SectorError::NotAnInvolution(format!(
                "{} ↦ {} ↦ {}",
                basis[a].name, basis[b].name, basis[involution[b]].name
            )));
        }
        if basis[a].degree != basis[b].degree {
            return Err(SectorError::SectorMismatch(format!(
                "{} and {} have different degrees",
                basis[a].name, basis[b].name
            )));
        }
    }
    if let Some(group) = group {
        let labels = sector_labels(basis, group)?;
        for (a, &b) in involution.iter().enumerate() {
            let rep = group.classes()[labels[a]].representative();
            let expected = group.class_of(group.inverse(rep));
            if labels[b] != expected {
                return Err(SectorError::SectorMismatch(format!(
                    "{} lies in sector ({}) but {} must lie in ({})",
                    basis[a].name,
                    group.class_name(labels[a]),
                    basis[b].name,
                    group.class_name(expected)
                )));
            }
        }
    }
    HermitianMatrix::new(Matrix::from_fn(n, n, |a, b| pairing.get(a, involution[b]).clone()))
}
