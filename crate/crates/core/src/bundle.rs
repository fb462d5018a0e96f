//! JSON bundles: one self-describing file per example.
//!
//! ```json
//! {
//!   "metadata": {"name": "demo", "description": "…"},
//!   "parameters": {"g": "2", "<b,C>": "-2"},
//!   "basis": [{"name": "a", "degree": 2}, {"name": "b", "degree": 2}],
//!   "cubic_form": true,
//!   "triples": [{"i": "b", "j": "b", "k": "b", "value": "8*(1-g)"}],
//!   "rays": {"names": ["C"], "nondegenerate": true},
//!   "series": [{"triple": ["b", "b", "b"],
//!               "tails": [{"ray": "C", "from": 1, "value": "2*(g-1)*<b,C>^3"}]}]
//! }
//! ```
//!
//! Every value is an exact scalar string or an arithmetic expression over
//! the parameters; see [`crate::expr`].

use std::collections::BTreeMap;
use std::path::Path;

use indexmap::IndexMap;
use serde::Deserialize;
use thiserror::Error;

use crate::algebra::{build_algebra, AlgebraError, BasisElement, CubicForm, PairingMatrix, TripleTensor};
use crate::correction::{corrected_triples, qc_triple_tensor, CorrectionError, ExtremalRaySet, GwSeries, Tail};
use crate::expr::{evaluate, resolve_params, ExprError, Params};
use crate::iso::{DiagonalMap, IsoError, Structure};
use crate::linalg::Matrix;
use crate::scalars::{GaussRational, Rational};
use crate::sector::{GroupSpec, SectorAlgebra, SectorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at {key}{}: {message}", position(*line, *column))]
    ParseError {
        key: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unresolved symbol {symbol:?} in {key}")]
    UnresolvedSymbol { key: String, symbol: String },
    #[error("schema violation at {key}{}: {message}", position(*line, *column))]
    SchemaViolation {
        key: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported tail kind {kind:?} at {key}")]
    UnsupportedTailKind { key: String, kind: String },
}

fn position(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" (line {line}, column {column})")
    }
}

fn schema(key: impl Into<String>, message: impl Into<String>) -> BundleError {
    BundleError::SchemaViolation {
        key: key.into(),
        line: 0,
        column: 0,
        message: message.into(),
    }
}

/// Everything that can go wrong between a bundle and a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Correction(#[from] CorrectionError),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error(transparent)]
    Sector(#[from] SectorError),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub name: String,
    pub degree: Number,
    #[serde(default)]
    pub sector: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleEntry {
    pub i: String,
    pub j: String,
    pub k: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaysEntry {
    pub names: Vec<String>,
    pub nondegenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub degree: Vec<u32>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailEntry {
    pub ray: String,
    pub from: u32,
    pub value: String,
    #[serde(default)]
    pub kind: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesEntry {
    pub triple: Vec<String>,
    #[serde(default)]
    pub terms: Vec<TermEntry>,
    #[serde(default)]
    pub tails: Vec<TailEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupEntry {
    pub order: usize,
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
    /// Degree-shifting number per class, keyed by any element of the class.
    #[serde(default)]
    pub iota: IndexMap<String, String>,
}

/// The raw file contents.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleFile {
    pub metadata: Metadata,
    #[serde(default)]
    pub parameters: IndexMap<String, String>,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub unit: Option<String>,
    #[serde(default)]
    pub top_degree: Option<Number>,
    #[serde(default)]
    pub pairing: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub cubic_form: bool,
    #[serde(default)]
    pub triples: Vec<TripleEntry>,
    #[serde(default)]
    pub rays: Option<RaysEntry>,
    #[serde(default)]
    pub series: Vec<SeriesEntry>,
    #[serde(default)]
    pub group: Option<GroupEntry>,
    #[serde(default)]
    pub involution: Option<IndexMap<String, String>>,
    #[serde(default)]
    pub candidate_map: Option<IndexMap<String, String>>,
}

/// A fully resolved bundle: every scalar exact, every name an index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub name: String,
    pub description: String,
    pub notes: Vec<String>,
    pub params: Params,
    pub basis: Vec<BasisElement>,
    pub unit: Option<usize>,
    pub top_degree: Option<Rational>,
    pub pairing: Option<PairingMatrix>,
    pub cubic_form: bool,
    pub triples: TripleTensor,
    pub rays: Option<ExtremalRaySet>,
    pub series: Vec<GwSeries>,
    pub group: Option<GroupSpec>,
    pub iota: Option<Vec<Rational>>,
    /// Basis permutation, identity where unspecified.
    pub involution: Option<Vec<usize>>,
    pub candidate_map: Option<DiagonalMap>,
}

/// Reads and resolves a bundle file.
pub fn parse_bundle(path: &Path) -> Result<Bundle, BundleError> {
    let text = std::fs::read_to_string(path).map_err(|e| BundleError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_bundle_str(&text, &[])
}

/// Parses bundle text, replacing parameter definitions by `overrides`
/// before anything is evaluated.
pub fn parse_bundle_str(text: &str, overrides: &[(String, String)]) -> Result<Bundle, BundleError> {
    Bundle::resolve(parse_bundle_file(text)?, overrides)
}

/// Parses bundle text without resolving any value.
pub fn parse_bundle_file(text: &str) -> Result<BundleFile, BundleError> {
    serde_json::from_str(text).map_err(|e| {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        match e.classify() {
            serde_json::error::Category::Data => BundleError::SchemaViolation {
                key: "<document>".into(),
                line,
                column,
                message,
            },
            _ => BundleError::ParseError {
                key: "<document>".into(),
                line,
                column,
                message,
            },
        }
    })
}

fn expr_error(key: &str, e: ExprError) -> BundleError {
    match e {
        ExprError::UnresolvedSymbol(symbol) => BundleError::UnresolvedSymbol {
            key: key.to_string(),
            symbol,
        },
        other => BundleError::ParseError {
            key: key.to_string(),
            line: 0,
            column: 0,
            message: other.to_string(),
        },
    }
}

fn rational(key: &str, n: &Number, params: &Params) -> Result<Rational, BundleError> {
    match n {
        Number::Int(i) => Ok(Rational::from(*i)),
        Number::Text(s) => {
            let v = evaluate(s, params).map_err(|e| expr_error(key, e))?;
            v.as_real().cloned().map_err(|_| schema(key, format!("{s:?} must be real")))
        }
    }
}

impl Bundle {
    pub fn resolve(file: BundleFile, overrides: &[(String, String)]) -> Result<Self, BundleError> {
        let mut defs = file.parameters.clone();
        for (k, v) in overrides {
            match defs.get_mut(k) {
                Some(slot) => *slot = v.clone(),
                None => return Err(schema(format!("parameters.{k}"), "no such parameter to override")),
            }
        }
        let params = resolve_params(defs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
            .map_err(|(name, e)| expr_error(&format!("parameters.{name}"), e))?;
        let ev = |key: &str, s: &str| evaluate(s, &params).map_err(|e| expr_error(key, e));

        let mut basis = Vec::with_capacity(file.basis.len());
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, b) in file.basis.iter().enumerate() {
            let key = format!("basis[{i}]");
            if index.insert(&b.name, i).is_some() {
                return Err(schema(key, format!("duplicate basis name {:?}", b.name)));
            }
            let degree = rational(&format!("{key}.degree"), &b.degree, &params)?;
            let mut el = BasisElement::new(b.name.clone(), degree);
            if let Some(s) = &b.sector {
                el = el.with_sector(s.clone());
            }
            basis.push(el);
        }
        let n = basis.len();
        if n == 0 {
            return Err(schema("basis", "basis is empty"));
        }
        let lookup = |key: &str, name: &str| -> Result<usize, BundleError> {
            index.get(name).copied().ok_or_else(|| BundleError::UnresolvedSymbol {
                key: key.to_string(),
                symbol: name.to_string(),
            })
        };

        let top_degree = file
            .top_degree
            .as_ref()
            .map(|t| rational("top_degree", t, &params))
            .transpose()?;

        let pairing = match (&file.pairing, file.cubic_form) {
            (Some(_), true) => return Err(schema("pairing", "give either a pairing or \"cubic_form\": true, not both")),
            (None, false) => return Err(schema("pairing", "one of \"pairing\" or \"cubic_form\": true is required")),
            (None, true) => {
                if let Some(b) = basis.iter().find(|b| b.degree != Rational::from(2)) {
                    return Err(schema("basis", format!("cubic-form bundles hold degree-2 classes only; {} has degree {}", b.name, b.degree)));
                }
                None
            }
            (Some(rows), false) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(schema("pairing", format!("pairing must be {n}×{n}")));
                }
                let mut m = Matrix::zeros(n, n);
                for (i, row) in rows.iter().enumerate() {
                    for (j, s) in row.iter().enumerate() {
                        m.set(i, j, ev(&format!("pairing[{i}][{j}]"), s)?);
                    }
                }
                Some(PairingMatrix::new(m).map_err(|e| schema("pairing", e.to_string()))?)
            }
        };

        // Without a degree-0 class the bundle only describes a pairing.
        let unit = match (&file.unit, file.cubic_form) {
            (_, true) => None,
            (Some(u), false) => Some(lookup("unit", u)?),
            (None, false) => basis.iter().position(|b| b.degree.is_zero()),
        };

        let mut triples = TripleTensor::new(n, top_degree.clone());
        for (t, e) in file.triples.iter().enumerate() {
            let key = format!("triples[{t}]");
            let idx = [lookup(&key, &e.i)?, lookup(&key, &e.j)?, lookup(&key, &e.k)?];
            let v = ev(&format!("{key}.value"), &e.value)?;
            triples.insert(idx, v).map_err(|err| schema(key, err.to_string()))?;
        }
        // <1, a, b> = <a, b>
        if let (Some(p), Some(u)) = (&pairing, unit) {
            for a in 0..n {
                for b in a..n {
                    triples
                        .insert([u, a, b], p.get(a, b).clone())
                        .map_err(|err| schema("triples", format!("disagrees with the pairing: {err}")))?;
                }
            }
        }

        let rays = file
            .rays
            .as_ref()
            .map(|r| ExtremalRaySet::new(r.names.clone(), r.nondegenerate).map_err(|e| schema("rays", e.to_string())))
            .transpose()?;
        let mut series = Vec::new();
        for (s, e) in file.series.iter().enumerate() {
            let key = format!("series[{s}]");
            let Some(rays) = &rays else {
                return Err(schema(key, "series given without \"rays\""));
            };
            if e.triple.len() != 3 {
                return Err(schema(format!("{key}.triple"), "a triple has three entries"));
            }
            let idx = [
                lookup(&format!("{key}.triple"), &e.triple[0])?,
                lookup(&format!("{key}.triple"), &e.triple[1])?,
                lookup(&format!("{key}.triple"), &e.triple[2])?,
            ];
            let terms = e
                .terms
                .iter()
                .enumerate()
                .map(|(t, term)| Ok((term.degree.clone(), ev(&format!("{key}.terms[{t}].value"), &term.value)?)))
                .collect::<Result<Vec<_>, BundleError>>()?;
            let mut tails = Vec::new();
            for (t, tail) in e.tails.iter().enumerate() {
                let tkey = format!("{key}.tails[{t}]");
                if let Some(kind) = tail.kind.as_deref().filter(|k| *k != "constant") {
                    return Err(BundleError::UnsupportedTailKind {
                        key: tkey,
                        kind: kind.to_string(),
                    });
                }
                let ray = rays.index_of(&tail.ray).ok_or_else(|| BundleError::UnresolvedSymbol {
                    key: format!("{tkey}.ray"),
                    symbol: tail.ray.clone(),
                })?;
                tails.push(Tail {
                    ray,
                    from: tail.from,
                    value: ev(&format!("{tkey}.value"), &tail.value)?,
                });
            }
            series.push(GwSeries::new(idx, rays.len(), terms, tails).map_err(|err| schema(key, err.to_string()))?);
        }

        let (group, iota) = match &file.group {
            None => (None, None),
            Some(g) => {
                if g.order != g.elements.len() {
                    return Err(schema("group.order", format!("order {} but {} elements", g.order, g.elements.len())));
                }
                let grp = GroupSpec::new(g.elements.clone(), g.table.clone()).map_err(|e| schema("group.table", e.to_string()))?;
                let mut values: Vec<Option<Rational>> = vec![None; grp.classes().len()];
                values[grp.class_of(grp.identity())] = Some(Rational::zero());
                for (el, v) in &g.iota {
                    let key = format!("group.iota.{el}");
                    let e = grp.index_of(el).map_err(|_| BundleError::UnresolvedSymbol {
                        key: key.clone(),
                        symbol: el.clone(),
                    })?;
                    let val = rational(&key, &Number::Text(v.clone()), &params)?;
                    let slot = &mut values[grp.class_of(e)];
                    if slot.as_ref().is_some_and(|old| *old != val) {
                        return Err(schema(key, "conflicting values for one conjugacy class"));
                    }
                    *slot = Some(val);
                }
                let iota = values
                    .into_iter()
                    .enumerate()
                    .map(|(c, v)| v.ok_or_else(|| schema("group.iota", format!("missing value for class ({})", grp.class_name(c)))))
                    .collect::<Result<Vec<_>, _>>()?;
                crate::sector::validate_iota(&grp, &iota).map_err(|e| schema("group.iota", e.to_string()))?;
                for b in &basis {
                    if let Some(s) = &b.sector {
                        grp.index_of(s).map_err(|_| BundleError::UnresolvedSymbol {
                            key: format!("basis.{}.sector", b.name),
                            symbol: s.clone(),
                        })?;
                    }
                }
                (Some(grp), Some(iota))
            }
        };

        let involution = file
            .involution
            .as_ref()
            .map(|m| {
                let mut perm: Vec<usize> = (0..n).collect();
                for (a, b) in m {
                    perm[lookup("involution", a)?] = lookup("involution", b)?;
                }
                Ok::<_, BundleError>(perm)
            })
            .transpose()?;

        let candidate_map = file
            .candidate_map
            .as_ref()
            .map(|m| {
                let mut scalars = vec![GaussRational::one(); n];
                for (name, v) in m {
                    let key = format!("candidate_map.{name}");
                    scalars[lookup(&key, name)?] = ev(&key, v)?;
                }
                DiagonalMap::new(scalars).map_err(|e| schema("candidate_map", e.to_string()))
            })
            .transpose()?;

        Ok(Bundle {
            name: file.metadata.name,
            description: file.metadata.description,
            notes: file.metadata.notes,
            params,
            basis,
            unit,
            top_degree,
            pairing,
            cubic_form: file.cubic_form,
            triples,
            rays,
            series,
            group,
            iota,
            involution,
            candidate_map,
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.basis.iter().map(|b| b.name.clone()).collect()
    }

    /// The ring or cubic form defined by `triples` on this bundle's basis.
    pub fn structure(&self, triples: &TripleTensor) -> Result<Structure, PipelineError> {
        match (&self.pairing, self.unit) {
            (Some(p), Some(u)) => Ok(Structure::Algebra(build_algebra(self.basis.clone(), u, p.clone(), triples.clone())?)),
            (Some(_), None) => Err(schema("unit", "a ring needs a degree-0 unit").into()),
            (None, _) => Ok(Structure::Cubic(CubicForm::from_tensor(self.names(), triples)?)),
        }
    }

    pub fn classical(&self) -> Result<Structure, PipelineError> {
        self.structure(&self.triples)
    }

    /// `<, ,>_qc` at `q = −1`; zero when the bundle has no series.
    pub fn qc_tensor(&self) -> Result<TripleTensor, PipelineError> {
        match &self.rays {
            None => Ok(TripleTensor::new(self.basis.len(), self.top_degree.clone())),
            Some(rays) => Ok(qc_triple_tensor(&self.series, rays, &self.basis, self.top_degree.clone())?),
        }
    }

    pub fn corrected_tensor(&self) -> Result<TripleTensor, PipelineError> {
        Ok(corrected_triples(&self.triples, &self.qc_tensor()?)?)
    }

    pub fn corrected(&self) -> Result<Structure, PipelineError> {
        self.structure(&self.corrected_tensor()?)
    }

    /// The classical ring split by sector; requires a group.
    pub fn sector_algebra(&self) -> Result<Option<SectorAlgebra>, PipelineError> {
        let (Some(group), Some(iota)) = (&self.group, &self.iota) else {
            return Ok(None);
        };
        let Structure::Algebra(alg) = self.classical()? else {
            return Ok(None);
        };
        Ok(Some(SectorAlgebra::from_basis_sectors(alg, group.clone(), iota.clone())?))
    }
}
