//! Ring isomorphisms between graded algebras or cubic forms.
//!
//! [`verify_map`] checks a candidate map exactly. [`solve_diagonal`] looks
//! for a basis rescaling `e_a ↦ λ_a e'_a` over `Q(i)`: every nonzero
//! structure constant gives a multiplicative equation in the `λ`s, which is
//! solved through the Smith normal form of its integer exponent matrix.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::algebra::{CubicForm, GradedAlgebra};
use crate::bundle::{Bundle, PipelineError};
use crate::linalg::Matrix;
use crate::scalars::{GaussRational, Rational};
use crate::snf::smith_normal_form;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("map is singular")]
    SingularMap,
    #[error("map does not preserve degrees: {0}")]
    NotDegreePreserving(String),
    #[error("diagonal map has a zero scalar at index {0}")]
    ZeroScalar(usize),
}

/// A ring or a cubic form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Algebra(GradedAlgebra),
    Cubic(CubicForm),
}

impl Structure {
    pub fn dim(&self) -> usize {
        match self {
            Structure::Algebra(a) => a.dim(),
            Structure::Cubic(f) => f.dim(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        match self {
            Structure::Algebra(a) => a.basis().iter().map(|b| b.name.clone()).collect(),
            Structure::Cubic(f) => f.names().to_vec(),
        }
    }

    fn degrees(&self) -> Vec<Rational> {
        match self {
            Structure::Algebra(a) => a.basis().iter().map(|b| b.degree.clone()).collect(),
            Structure::Cubic(f) => vec![Rational::from(2); f.dim()],
        }
    }
}

/// A linear map given by its matrix: row `a` holds the image of `e_a` in
/// the target basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap(Matrix);

impl LinearMap {
    /// Checks that the matrix is square, invertible and only connects basis
    /// elements of equal degree.
    pub fn new(matrix: Matrix, source_degrees: &[Rational], target_degrees: &[Rational]) -> Result<Self, IsoError> {
        let n = source_degrees.len();
        if matrix.rows() != n || matrix.cols() != target_degrees.len() || !matrix.is_square() {
            return Err(IsoError::ShapeMismatch(format!(
                "map is {}×{}, bases have sizes {} and {}",
                matrix.rows(),
                matrix.cols(),
                n,
                target_degrees.len()
            )));
        }
        for a in 0..n {
            for b in 0..n {
                if !matrix.get(a, b).is_zero() && source_degrees[a] != target_degrees[b] {
                    return Err(IsoError::NotDegreePreserving(format!(
                        "source element {a} (degree {}) maps onto target element {b} (degree {})",
                        source_degrees[a], target_degrees[b]
                    )));
                }
            }
        }
        if matrix.determinant().is_none_or(|d| d.is_zero()) {
            return Err(IsoError::SingularMap);
        }
        Ok(LinearMap(matrix))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

/// `e_a ↦ λ_a e'_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalMap(Vec<GaussRational>);

impl DiagonalMap {
    pub fn new(scalars: Vec<GaussRational>) -> Result<Self, IsoError> {
        match scalars.iter().position(GaussRational::is_zero) {
            Some(i) => Err(IsoError::ZeroScalar(i)),
            None => Ok(DiagonalMap(scalars)),
        }
    }

    pub fn identity(n: usize) -> Self {
        DiagonalMap(vec![GaussRational::one(); n])
    }

    pub fn scalars(&self) -> &[GaussRational] {
        &self.0
    }

    pub fn to_matrix(&self) -> Matrix {
        let n = self.0.len();
        Matrix::from_fn(n, n, |i, j| if i == j { self.0[i].clone() } else { GaussRational::zero() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Map {
    Linear(LinearMap),
    Diagonal(DiagonalMap),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Products,
    ProductsAndPairing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    Refuted,
    Solved,
    NoDiagonalSolution,
    NeedsFieldExtension,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Verified => "verified",
            Verdict::Refuted => "refuted",
            Verdict::Solved => "solved",
            Verdict::NoDiagonalSolution => "no-diagonal-solution",
            Verdict::NeedsFieldExtension => "needs-field-extension",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Coefficient of `e_c` in `e_a ∪ e_b`.
    Product,
    /// Value of a cubic form.
    Cubic,
    /// Value of the pairing on `(a, b)`; the third index repeats `b`.
    Pairing,
    /// The unit goes to the unit.
    Unit,
}

/// A failing constraint: `lhs` is computed from the target structure and the
/// map, `rhs` from the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub kind: ConstraintKind,
    pub indices: [usize; 3],
    pub lhs: GaussRational,
    pub rhs: GaussRational,
}

impl Obstruction {
    pub fn describe(&self, names: &[String]) -> String {
        let [a, b, c] = self.indices;
        let what = match self.kind {
            ConstraintKind::Product => format!("coefficient of {} in {} ∪ {}", names[c], names[a], names[b]),
            ConstraintKind::Cubic => format!("({}, {}, {})", names[a], names[b], names[c]),
            ConstraintKind::Pairing => format!("pairing ({}, {})", names[a], names[b]),
            ConstraintKind::Unit => format!("unit {}", names[a]),
        };
        format!("{what}: {} ≠ {}", self.lhs, self.rhs)
    }
}

/// Floating-point scalars for a solution that needs roots outside `Q(i)`.
/// Not a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericWitness {
    pub scalars: Vec<Complex64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoReport {
    pub verdict: Verdict,
    pub witness: Option<Map>,
    pub obstruction: Option<Obstruction>,
    /// For solver refutations: the map that was substituted to exhibit the
    /// obstruction.
    pub trial: Option<DiagonalMap>,
    pub numeric: Option<NumericWitness>,
    /// Integer directions `v` such that `λ_j t^{v_j}` is again a solution.
    pub kernel: Vec<Vec<i64>>,
}

impl IsoReport {
    fn new(verdict: Verdict) -> Self {
        IsoReport {
            verdict,
            witness: None,
            obstruction: None,
            trial: None,
            numeric: None,
            kernel: Vec::new(),
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self.verdict, Verdict::Verified | Verdict::Solved)
    }

    pub fn diagonal_witness(&self) -> Option<&DiagonalMap> {
        match &self.witness {
            Some(Map::Diagonal(d)) => Some(d),
            _ => None,
        }
    }
}

/// `∏ λ_j^{e_j} · target = source`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Constraint {
    kind: ConstraintKind,
    indices: [usize; 3],
    exponents: Vec<(usize, i64)>,
    target: GaussRational,
    source: GaussRational,
}

impl Constraint {
    fn new(kind: ConstraintKind, indices: [usize; 3], signed: &[(usize, i64)], target: GaussRational, source: GaussRational) -> Self {
        let mut exponents: Vec<(usize, i64)> = Vec::new();
        for &(j, e) in signed {
            match exponents.iter_mut().find(|(k, _)| *k == j) {
                Some(entry) => entry.1 += e,
                None => exponents.push((j, e)),
            }
        }
        exponents.retain(|&(_, e)| e != 0);
        exponents.sort_unstable();
        Constraint {
            kind,
            indices,
            exponents,
            target,
            source,
        }
    }

    fn lhs(&self, lambda: &[GaussRational]) -> GaussRational {
        self.exponents.iter().fold(self.target.clone(), |acc, &(j, e)| {
            &acc * &lambda[j].pow(e).expect("nonzero scalar")
        })
    }

    fn check(&self, lambda: &[GaussRational]) -> Option<Obstruction> {
        let lhs = self.lhs(lambda);
        (lhs != self.source).then(|| Obstruction {
            kind: self.kind,
            indices: self.indices,
            lhs,
            rhs: self.source.clone(),
        })
    }

    fn residual(&self, lambda: &[Complex64]) -> f64 {
        let lhs = self
            .exponents
            .iter()
            .fold(self.target.to_complex64(), |acc, &(j, e)| acc * lambda[j].powi(e as i32));
        (lhs - self.source.to_complex64()).norm()
    }
}

fn check_shapes(a: &Structure, b: &Structure) -> Result<(), IsoError> {
    match (a, b) {
        (Structure::Algebra(_), Structure::Algebra(_)) | (Structure::Cubic(_), Structure::Cubic(_)) => {}
        _ => return Err(IsoError::ShapeMismatch("cannot compare an algebra with a cubic form".into())),
    }
    if a.dim() != b.dim() {
        return Err(IsoError::ShapeMismatch(format!("dimensions {} and {}", a.dim(), b.dim())));
    }
    let (da, db) = (a.degrees(), b.degrees());
    if let Some(i) = (0..da.len()).find(|&i| da[i] != db[i]) {
        return Err(IsoError::ShapeMismatch(format!(
            "basis element {i} has degree {} in the source and {} in the target",
            da[i], db[i]
        )));
    }
    if let (Structure::Algebra(x), Structure::Algebra(y)) = (a, b) {
        if x.unit() != y.unit() {
            return Err(IsoError::ShapeMismatch("units sit at different basis positions".into()));
        }
    }
    Ok(())
}

/// Every constraint a diagonal map `source → target` must satisfy, in a
/// fixed order: unit, then products (or cubic values), then pairings.
fn diagonal_constraints(source: &Structure, target: &Structure, mode: VerifyMode) -> Result<Vec<Constraint>, IsoError> {
    check_shapes(source, target)?;
    let n = source.dim();
    let mut out = Vec::new();
    match (source, target) {
        (Structure::Algebra(s), Structure::Algebra(t)) => {
            let u = s.unit();
            out.push(Constraint::new(ConstraintKind::Unit, [u, u, u], &[(u, 1)], GaussRational::one(), GaussRational::one()));
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let (tv, sv) = (t.structure_constant(a, b, c), s.structure_constant(a, b, c));
                        if tv.is_zero() && sv.is_zero() {
                            continue;
                        }
                        out.push(Constraint::new(
                            ConstraintKind::Product,
                            [a, b, c],
                            &[(a, 1), (b, 1), (c, -1)],
                            tv.clone(),
                            sv.clone(),
                        ));
                    }
                }
            }
            if mode == VerifyMode::ProductsAndPairing {
                let (Some(sp), Some(tp)) = (s.pairing(), t.pairing()) else {
                    return Err(IsoError::ShapeMismatch("pairing check requested but a pairing is missing".into()));
                };
                for a in 0..n {
                    for b in a..n {
                        let (tv, sv) = (tp.get(a, b), sp.get(a, b));
                        if tv.is_zero() && sv.is_zero() {
                            continue;
                        }
                        out.push(Constraint::new(ConstraintKind::Pairing, [a, b, b], &[(a, 1), (b, 1)], tv.clone(), sv.clone()));
                    }
                }
            }
        }
        (Structure::Cubic(s), Structure::Cubic(t)) => {
            for a in 0..n {
                for b in a..n {
                    for c in b..n {
                        let (tv, sv) = (t.get(a, b, c), s.get(a, b, c));
                        if tv.is_zero() && sv.is_zero() {
                            continue;
                        }
                        out.push(Constraint::new(ConstraintKind::Cubic, [a, b, c], &[(a, 1), (b, 1), (c, 1)], tv, sv));
                    }
                }
            }
        }
        _ => unreachable!("shapes checked"),
    }
    Ok(out)
}

fn verify_diagonal(source: &Structure, target: &Structure, m: &DiagonalMap, mode: VerifyMode) -> Result<Option<Obstruction>, IsoError> {
    if m.scalars().len() != source.dim() {
        return Err(IsoError::ShapeMismatch(format!("map has {} scalars for a basis of {}", m.scalars().len(), source.dim())));
    }
    let constraints = diagonal_constraints(source, target, mode)?;
    Ok(constraints.iter().find_map(|c| c.check(m.scalars())))
}

fn verify_linear(source: &Structure, target: &Structure, m: &LinearMap, mode: VerifyMode) -> Result<Option<Obstruction>, IsoError> {
    check_shapes(source, target)?;
    let n = source.dim();
    let mat = m.matrix();
    if mat.rows() != n {
        return Err(IsoError::ShapeMismatch(format!("map has {} rows for a basis of {}", mat.rows(), n)));
    }
    LinearMap::new(mat.clone(), &source.degrees(), &target.degrees())?;
    let img = |a: usize| mat.row(a).to_vec();
    match (source, target) {
        (Structure::Algebra(s), Structure::Algebra(t)) => {
            let u = s.unit();
            let unit_img = img(u);
            for (j, v) in unit_img.iter().enumerate() {
                let want = if j == t.unit() { GaussRational::one() } else { GaussRational::zero() };
                if *v != want {
                    return Ok(Some(Obstruction {
                        kind: ConstraintKind::Unit,
                        indices: [u, j, j],
                        lhs: v.clone(),
                        rhs: want,
                    }));
                }
            }
            for a in 0..n {
                for b in 0..n {
                    // m(e_a ∪ e_b) against m(e_a) ∪' m(e_b)
                    let lhs_vec = t.multiply(&img(a), &img(b));
                    let rhs_vec = mat.left_apply(s.product(a, b));
                    if let Some(c) = (0..n).find(|&c| lhs_vec[c] != rhs_vec[c]) {
                        return Ok(Some(Obstruction {
                            kind: ConstraintKind::Product,
                            indices: [a, b, c],
                            lhs: lhs_vec[c].clone(),
                            rhs: rhs_vec[c].clone(),
                        }));
                    }
                }
            }
            if mode == VerifyMode::ProductsAndPairing {
                let (Some(sp), Some(tp)) = (s.pairing(), t.pairing()) else {
                    return Err(IsoError::ShapeMismatch("pairing check requested but a pairing is missing".into()));
                };
                for a in 0..n {
                    for b in a..n {
                        let lhs = tp.pair(&img(a), &img(b));
                        if lhs != *sp.get(a, b) {
                            return Ok(Some(Obstruction {
                                kind: ConstraintKind::Pairing,
                                indices: [a, b, b],
                                lhs,
                                rhs: sp.get(a, b).clone(),
                            }));
                        }
                    }
                }
            }
        }
        (Structure::Cubic(s), Structure::Cubic(t)) => {
            let dense: Vec<GaussRational> = (0..n * n * n).map(|x| t.get(x / (n * n), (x / n) % n, x % n)).collect();
            for a in 0..n {
                for b in a..n {
                    for c in b..n {
                        let (ia, ib, ic) = (img(a), img(b), img(c));
                        let mut lhs = GaussRational::zero();
                        for i in (0..n).filter(|&i| !ia[i].is_zero()) {
                            for j in (0..n).filter(|&j| !ib[j].is_zero()) {
                                let ab = &ia[i] * &ib[j];
                                for k in (0..n).filter(|&k| !ic[k].is_zero()) {
                                    lhs += &(&(&ab * &ic[k]) * &dense[(i * n + j) * n + k]);
                                }
                            }
                        }
                        let rhs = s.get(a, b, c);
                        if lhs != rhs {
                            return Ok(Some(Obstruction {
                                kind: ConstraintKind::Cubic,
                                indices: [a, b, c],
                                lhs,
                                rhs,
                            }));
                        }
                    }
                }
            }
        }
        _ => unreachable!("shapes checked"),
    }
    Ok(None)
}

/// Checks that `m: source → target` is a ring map (or preserves the cubic
/// form). Bases are matched by position.
pub fn verify_map(source: &Structure, target: &Structure, m: &Map, mode: VerifyMode) -> Result<IsoReport, IsoError> {
    let obstruction = match m {
        Map::Diagonal(d) => verify_diagonal(source, target, d, mode)?,
        Map::Linear(l) => verify_linear(source, target, l, mode)?,
    };
    Ok(match obstruction {
        None => IsoReport {
            witness: Some(m.clone()),
            ..IsoReport::new(Verdict::Verified)
        },
        Some(o) => IsoReport {
            obstruction: Some(o),
            ..IsoReport::new(Verdict::Refuted)
        },
    })
}

fn big_to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("unimodular transform entries fit in i64 for small systems")
}

/// Searches for a diagonal isomorphism `source → target` over `Q(i)`.
///
/// Free scalars are set to 1. Zero-pattern mismatches are refuted
/// outright; systems whose exponent relations are inconsistent yield
/// [`Verdict::NoDiagonalSolution`]. Both carry an obstruction found by
/// substituting a best-effort trial map.
pub fn solve_diagonal(source: &Structure, target: &Structure) -> Result<IsoReport, IsoError> {
    solve_diagonal_with(source, target, VerifyMode::Products)
}

pub fn solve_diagonal_with(source: &Structure, target: &Structure, mode: VerifyMode) -> Result<IsoReport, IsoError> {
    let constraints = diagonal_constraints(source, target, mode)?;
    let n = source.dim();
    let ones = vec![GaussRational::one(); n];

    if let Some(c) = constraints.iter().find(|c| c.target.is_zero() != c.source.is_zero()) {
        return Ok(IsoReport {
            obstruction: c.check(&ones),
            trial: Some(DiagonalMap::identity(n)),
            ..IsoReport::new(Verdict::Refuted)
        });
    }

    let rows: Vec<Vec<i64>> = constraints
        .iter()
        .map(|c| {
            let mut row = vec![0i64; n];
            for &(j, e) in &c.exponents {
                row[j] = e;
            }
            row
        })
        .collect();
    let ratios: Vec<GaussRational> = constraints
        .iter()
        .map(|c| c.source.checked_div(&c.target).expect("nonzero target"))
        .collect();
    let smith = smith_normal_form(&rows, n);
    let rank = smith.rank();

    // r'_l = ∏_i r_i^{U_li}
    let transformed: Vec<GaussRational> = smith
        .u
        .iter()
        .map(|u_row| {
            u_row.iter().zip(&ratios).fold(GaussRational::one(), |acc, (u, r)| {
                let e = big_to_i64(u);
                if e == 0 {
                    acc
                } else {
                    &acc * &r.pow(e).expect("nonzero ratio")
                }
            })
        })
        .collect();
    let consistent = transformed[rank..].iter().all(GaussRational::is_one);

    // μ_l^{d_l} = r'_l for l < rank; μ_l = 1 beyond.
    let mut exact_mu: Vec<Option<GaussRational>> = vec![Some(GaussRational::one()); n];
    let mut numeric_mu: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n];
    for l in 0..rank {
        let d = smith.diagonal[l].to_u32().expect("small elementary divisor");
        exact_mu[l] = transformed[l].nth_root(d);
        numeric_mu[l] = match &exact_mu[l] {
            Some(m) => m.to_complex64(),
            None => transformed[l].to_complex64().powf(1.0 / d as f64),
        };
    }
    let v = &smith.v;
    let kernel: Vec<Vec<i64>> = (rank..n).map(|k| (0..n).map(|j| big_to_i64(&v[j][k])).collect()).collect();

    let exact_lambda = |mu: &[GaussRational]| -> Vec<GaussRational> {
        (0..n)
            .map(|j| {
                (0..n).fold(GaussRational::one(), |acc, k| {
                    let e = big_to_i64(&v[j][k]);
                    if e == 0 {
                        acc
                    } else {
                        &acc * &mu[k].pow(e).expect("nonzero")
                    }
                })
            })
            .collect()
    };

    if !consistent {
        let mu: Vec<GaussRational> = exact_mu.iter().map(|m| m.clone().unwrap_or_else(GaussRational::one)).collect();
        let trial = exact_lambda(&mu);
        let obstruction = constraints
            .iter()
            .find_map(|c| c.check(&trial))
            .expect("an inconsistent system has no solution");
        return Ok(IsoReport {
            obstruction: Some(obstruction),
            trial: Some(DiagonalMap::new(trial).expect("nonzero")),
            kernel,
            ..IsoReport::new(Verdict::NoDiagonalSolution)
        });
    }

    if exact_mu.iter().any(Option::is_none) {
        let lambda: Vec<Complex64> = (0..n)
            .map(|j| (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * numeric_mu[k].powi(big_to_i64(&v[j][k]) as i32)))
            .collect();
        let residual = constraints.iter().map(|c| c.residual(&lambda)).fold(0.0, f64::max);
        return Ok(IsoReport {
            numeric: Some(NumericWitness { scalars: lambda, residual }),
            kernel,
            ..IsoReport::new(Verdict::NeedsFieldExtension)
        });
    }

    let mu: Vec<GaussRational> = exact_mu.into_iter().map(Option::unwrap).collect();
    let witness = DiagonalMap::new(exact_lambda(&mu)).expect("products of nonzero scalars");
    let check = verify_map(source, target, &Map::Diagonal(witness.clone()), mode)?;
    if check.verdict != Verdict::Verified {
        return Ok(IsoReport {
            trial: Some(witness),
            kernel,
            ..check
        });
    }
    Ok(IsoReport {
        witness: Some(Map::Diagonal(witness)),
        kernel,
        ..IsoReport::new(Verdict::Solved)
    })
}

/// Moves a diagonal witness along an integer kernel direction:
/// `λ_j ↦ λ_j · t^{v_j}`.
pub fn perturb_along(witness: &DiagonalMap, direction: &[i64], t: &GaussRational) -> DiagonalMap {
    let scaled = witness
        .scalars()
        .iter()
        .zip(direction)
        .map(|(l, &e)| l * &t.pow(e).expect("nonzero parameter"))
        .collect();
    DiagonalMap::new(scaled).expect("nonzero scalars")
}

/// Corrects the resolution bundle's triples and searches for a diagonal
/// isomorphism from the orbifold structure onto the corrected one. Bases
/// are matched by position.
pub fn compare_corrected_to_orbifold(resolution: &Bundle, orbifold: &Bundle) -> Result<IsoReport, PipelineError> {
    let corrected = resolution.corrected()?;
    let orb = orbifold.classical()?;
    Ok(solve_diagonal(&orb, &corrected)?)
}
