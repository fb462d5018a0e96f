//! Bundled worked examples and the report each one produces.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::algebra::{pairing_signature, TripleTensor};
use crate::bundle::{parse_bundle_file, Bundle, BundleError, PipelineError};
use crate::iso::{compare_corrected_to_orbifold, solve_diagonal, verify_map, DiagonalMap, IsoReport, Map, Structure, Verdict, VerifyMode};
use crate::linalg::Matrix;
use crate::report::{Report, Section};
use crate::scalars::{i_pow, GaussRational};
use crate::sector::{hermitian_gram, qinwang_map, signed_product};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?}; available: local_cy_genus_g, hilb2_surface, c2_zgamma_pairing, atiyah_flop, mukai_trivial")]
    UnknownFixture(String),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

pub struct FixtureFile {
    pub file_name: &'static str,
    pub text: &'static str,
}

macro_rules! fixture_file {
    ($name:literal) => {
        FixtureFile {
            file_name: $name,
            text: include_str!(concat!("../fixtures/", $name)),
        }
    };
}

pub static FIXTURE_FILES: [FixtureFile; 10] = [
    fixture_file!("local_cy_genus_g_orbifold.json"),
    fixture_file!("local_cy_genus_g_resolution.json"),
    fixture_file!("hilb2_surface_orbifold.json"),
    fixture_file!("hilb2_surface_resolution.json"),
    fixture_file!("c2_zgamma_pairing_orbifold.json"),
    fixture_file!("c2_zgamma_pairing_resolution.json"),
    fixture_file!("atiyah_flop_x.json"),
    fixture_file!("atiyah_flop_xprime.json"),
    fixture_file!("mukai_trivial_x.json"),
    fixture_file!("mukai_trivial_xprime.json"),
];

pub const FIXTURE_NAMES: [&str; 5] = ["local_cy_genus_g", "hilb2_surface", "c2_zgamma_pairing", "atiyah_flop", "mukai_trivial"];

/// The two bundle texts of a fixture: source side first (orbifold, or the
/// unflopped side), then the target side.
pub fn fixture_texts(name: &str) -> Result<(&'static str, &'static str), FixtureError> {
    let i = FIXTURE_NAMES
        .iter()
        .position(|n| *n == name)
        .ok_or_else(|| FixtureError::UnknownFixture(name.to_string()))?;
    Ok((FIXTURE_FILES[2 * i].text, FIXTURE_FILES[2 * i + 1].text))
}

/// Resolves both bundles of a fixture. Each override applies to every
/// bundle declaring that parameter and must be declared by at least one.
pub fn load_fixture(name: &str, overrides: &[(String, String)]) -> Result<(Bundle, Bundle), FixtureError> {
    let (a, b) = fixture_texts(name)?;
    let (fa, fb) = (parse_bundle_file(a)?, parse_bundle_file(b)?);
    for (k, _) in overrides {
        if !fa.parameters.contains_key(k) && !fb.parameters.contains_key(k) {
            return Err(BundleError::SchemaViolation {
                key: format!("parameters.{k}"),
                line: 0,
                column: 0,
                message: format!("fixture {name} has no parameter {k:?}"),
            }
            .into());
        }
    }
    let pick = |f: &crate::bundle::BundleFile| -> Vec<(String, String)> {
        overrides.iter().filter(|(k, _)| f.parameters.contains_key(k)).cloned().collect()
    };
    let (oa, ob) = (pick(&fa), pick(&fb));
    Ok((Bundle::resolve(fa, &oa)?, Bundle::resolve(fb, &ob)?))
}

/// Runs a fixture end to end. The report passes iff every asserted check
/// holds; observations that are not asserted are recorded as info.
pub fn run_fixture(name: &str, overrides: &[(String, String)]) -> Result<Report, FixtureError> {
    let (a, b) = load_fixture(name, overrides)?;
    let mut report = Report::new(format!("fixture {name}"));
    {
        let s = report.section("parameters");
        for bundle in [&a, &b] {
            for (k, v) in &bundle.params {
                s.info(format!("{}: {k}", bundle.name), v, "");
            }
        }
    }
    let result = match name {
        "local_cy_genus_g" => local_cy(&mut report, &a, &b),
        "hilb2_surface" => hilb2(&mut report, &a, &b),
        "c2_zgamma_pairing" => c2_pairing(&mut report, &a, &b),
        "atiyah_flop" => atiyah(&mut report, &a, &b),
        "mukai_trivial" => mukai(&mut report, &a, &b),
        _ => unreachable!("names checked by load_fixture"),
    };
    if let Err(e) = result {
        report.section("pipeline").assert("pipeline completed", false, e.to_string());
    }
    Ok(report)
}

/// Writes every bundled fixture file into `dir`, creating it if needed.
pub fn dump_fixtures(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    FIXTURE_FILES
        .iter()
        .map(|f| {
            let path = dir.join(f.file_name);
            std::fs::write(&path, f.text)?;
            Ok(path)
        })
        .collect()
}

fn idx(b: &Bundle, name: &str) -> usize {
    b.basis
        .iter()
        .position(|x| x.name == name)
        .unwrap_or_else(|| panic!("fixture basis lacks {name}"))
}

fn value(b: &Bundle, t: &TripleTensor, names: [&str; 3]) -> GaussRational {
    t.get(idx(b, names[0]), idx(b, names[1]), idx(b, names[2]))
}

fn label(names: [&str; 3], suffix: &str) -> String {
    format!("<{},{},{}>{suffix}", names[0], names[1], names[2])
}

fn param(b: &Bundle, name: &str) -> GaussRational {
    b.params[name].clone()
}

fn int(n: i64) -> GaussRational {
    GaussRational::from_int(n)
}

fn scalars(m: &DiagonalMap, names: &[String]) -> String {
    let parts: Vec<String> = names.iter().zip(m.scalars()).map(|(n, v)| format!("{n} -> {v}")).collect();
    parts.join(", ")
}

fn matrix(m: &Matrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn describe(rep: &IsoReport, names: &[String]) -> String {
    match (&rep.witness, &rep.obstruction, &rep.numeric) {
        (Some(Map::Diagonal(d)), _, _) => scalars(d, names),
        (Some(Map::Linear(_)), _, _) => "linear witness".into(),
        (None, Some(o), _) => o.describe(names),
        (None, None, Some(n)) => format!("numeric witness, residual {:e} (not a certificate)", n.residual),
        _ => String::new(),
    }
}

fn record_candidate(s: &mut Section, src: &Bundle, a: &Structure, b: &Structure) -> Result<(), PipelineError> {
    if let Some(m) = &src.candidate_map {
        let rep = verify_map(a, b, &Map::Diagonal(m.clone()), VerifyMode::Products)?;
        s.info(
            format!("literal candidate map {{{}}}", scalars(m, &src.names())),
            rep.verdict,
            describe(&rep, &src.names()),
        );
    }
    Ok(())
}

fn local_cy(r: &mut Report, orb: &Bundle, res: &Bundle) -> Result<(), PipelineError> {
    let g = param(res, "g");
    let one_minus_g = &int(1) - &g;
    let cl = &res.triples;
    let qc = res.qc_tensor()?;
    let corrected = res.corrected_tensor()?;
    let all = [
        ["alpha'", "alpha'", "alpha'"],
        ["alpha'", "alpha'", "beta'"],
        ["alpha'", "beta'", "beta'"],
        ["beta'", "beta'", "beta'"],
    ];

    let s = r.section("classical triple intersections");
    s.expect(label(all[2], ""), int(-2), value(res, cl, all[2]));
    s.expect(label(all[3], ""), &int(8) * &one_minus_g, value(res, cl, all[3]));

    let s = r.section("quantum corrections at q = -1");
    let minus_8 = &int(-8) * &one_minus_g;
    for (t, want) in all.iter().zip([int(0), int(0), int(0), minus_8]) {
        s.expect(label(*t, "_qc"), want, value(res, &qc, *t));
    }

    let s = r.section("corrected triple intersections");
    s.expect(label(all[3], "_pi"), int(0), value(res, &corrected, all[3]));
    s.expect(label(all[2], "_pi"), int(-2), value(res, &corrected, all[2]));
    s.expect(
        "<beta,beta,beta> on the orbifold",
        int(0),
        value(orb, &orb.triples, ["beta", "beta", "beta"]),
    );

    let s = r.section("isomorphism");
    let rep = compare_corrected_to_orbifold(res, orb)?;
    s.expect("diagonal solver verdict", Verdict::Solved, rep.verdict);
    if let Some(w) = rep.diagonal_witness() {
        s.info("witness", scalars(w, &orb.names()), "free scalars set to 1");
        let l = w.scalars();
        s.expect("lambda_alpha * lambda_beta^2", "-1/4", &(&l[0] * &l[1]) * &l[1]);
    }
    let (a, b) = (orb.classical()?, res.corrected()?);
    let quarter = DiagonalMap::new(vec!["-1/4".parse().expect("literal"), int(1)]).expect("nonzero");
    let check = verify_map(&a, &b, &Map::Diagonal(quarter), VerifyMode::Products)?;
    s.expect("map alpha -> -1/4 alpha', beta -> beta'", Verdict::Verified, check.verdict);
    record_candidate(s, orb, &a, &b)?;
    Ok(())
}

fn hilb2(r: &mut Report, orb: &Bundle, res: &Bundle) -> Result<(), PipelineError> {
    let c1 = param(res, "<C1,h>");
    let hh = param(res, "<h,h>");
    let cl = &res.triples;
    let qc = res.qc_tensor()?;
    let corrected = res.corrected_tensor()?;
    let bbh = ["b1", "b1", "bh"];

    let s = r.section("classical triple intersections");
    s.expect(label(bbh, ""), &int(-4) * &c1, value(res, cl, bbh));
    s.expect(label(["b1", "b1", "DH"], ""), int(-4), value(res, cl, ["b1", "b1", "DH"]));
    s.expect(label(["b1", "b1", "S"], ""), &int(-4) * &hh, value(res, cl, ["b1", "b1", "S"]));
    s.expect(label(["b1", "bh", "D"], ""), &int(-4) * &hh, value(res, cl, ["b1", "bh", "D"]));

    let s = r.section("quantum corrections at q = -1");
    s.expect(label(bbh, "_qc"), &int(4) * &c1, value(res, &qc, bbh));
    s.expect("nonzero correction entries", 1, qc.entries().count());

    let s = r.section("corrected product");
    s.expect(label(bbh, "_pi"), int(0), value(res, &corrected, bbh));
    let Structure::Algebra(ring) = res.corrected()? else {
        unreachable!("hilb2 bundles carry a pairing")
    };
    s.expect(
        "coefficient of bh in b1 cup_pi b1",
        int(0),
        ring.structure_constant(idx(res, "b1"), idx(res, "b1"), idx(res, "bh")),
    );
    s.info("structure violations of the corrected ring", ring.check_structure().len(), "listed triples only");

    let s = r.section("isomorphism");
    let rep = compare_corrected_to_orbifold(res, orb)?;
    s.expect("diagonal solver verdict", Verdict::Solved, rep.verdict);
    s.info("witness", describe(&rep, &orb.names()), "free scalars set to 1");
    let (a, b) = (orb.classical()?, Structure::Algebra(ring.clone()));
    record_candidate(s, orb, &a, &b)?;

    let s = r.section("sign-twisted orbifold product");
    let sa = orb.sector_algebra()?.expect("hilb2 orbifold bundle has a group");
    let signed = signed_product(&sa)?;
    let qw = qinwang_map(&sa)?;
    s.info("rescaling i^iota", scalars(&qw, &orb.names()), "");
    let inter = verify_map(
        &Structure::Algebra(signed.algebra().clone()),
        &Structure::Algebra(sa.algebra().clone()),
        &Map::Diagonal(qw),
        VerifyMode::Products,
    )?;
    s.expect("rescaling intertwines the twisted and untwisted products", Verdict::Verified, inter.verdict);
    let conj = sa.component_keys().all(|k| {
        let io = |c: usize| sa.iota()[c].to_i64().expect("integer iota");
        let eps = sa.epsilon(k).to_i64().expect("integer epsilon");
        &i_pow(io(k.0)) * &i_pow(io(k.1)) == &i_pow(io(k.2)) * &i_pow(2 * eps)
    });
    s.assert("i^iota(h1) i^iota(h2) = i^iota(h1h2) (-1)^eps on every component", conj, "");
    let twisted = solve_diagonal(&Structure::Algebra(signed.algebra().clone()), &b)?;
    s.info("solver verdict against the twisted product", twisted.verdict, describe(&twisted, &orb.names()));
    Ok(())
}

fn c2_pairing(r: &mut Report, orb: &Bundle, res: &Bundle) -> Result<(), PipelineError> {
    let pairing = orb.pairing.as_ref().expect("pairing bundle").matrix();
    let s = r.section("raw orbifold pairing");
    let sig = pairing_signature(pairing)?;
    s.expect("degree-2 signature (positive,negative,zero)", "(1,1,0)", sig);
    s.info("definiteness", if sig.positive > 0 && sig.negative > 0 { "indefinite" } else { "definite" }, "");

    let s = r.section("hermitian pairing <<a,b>> = <a,I(b)>");
    let involution = orb.involution.as_ref().expect("involution");
    let gram = hermitian_gram(pairing, &orb.basis, involution, orb.group.as_ref())?;
    s.info("Gram matrix", matrix(gram.matrix()), "");
    s.expect("positive definite", true, gram.is_positive_definite());

    let s = r.section("resolution");
    let res_sig = pairing_signature(res.pairing.as_ref().expect("pairing bundle").matrix())?;
    s.info("signature of the exceptional curves", res_sig, "negative definite lattice");
    Ok(())
}

fn atiyah(r: &mut Report, x: &Bundle, xp: &Bundle) -> Result<(), PipelineError> {
    let identity = Map::Diagonal(DiagonalMap::identity(x.basis.len()));
    let s = r.section("classical cubic forms");
    let classical = verify_map(&x.classical()?, &xp.classical()?, &identity, VerifyMode::Products)?;
    s.info("identity on classical forms", classical.verdict, describe(&classical, &x.names()));

    let s = r.section("quantum corrections at q = -1");
    let (qx, qxp) = (x.qc_tensor()?, xp.qc_tensor()?);
    for (k, v) in qx.entries() {
        s.info(label([&x.names()[k[0]], &x.names()[k[1]], &x.names()[k[2]]], "_qc on X"), v, "");
    }
    for (k, v) in qxp.entries() {
        s.info(label([&xp.names()[k[0]], &xp.names()[k[1]], &xp.names()[k[2]]], "_qc on X'"), v, "");
    }

    let s = r.section("corrected cubic forms");
    let (cx, cxp) = (x.corrected_tensor()?, xp.corrected_tensor()?);
    let n = x.basis.len();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                s.expect(
                    format!("<{},{},{}>_pi on X and X'", x.names()[i], x.names()[j], x.names()[k]),
                    cx.get(i, j, k),
                    cxp.get(i, j, k),
                );
            }
        }
    }
    let corrected = verify_map(&x.corrected()?, &xp.corrected()?, &identity, VerifyMode::Products)?;
    s.expect("identity on corrected forms", Verdict::Verified, corrected.verdict);
    Ok(())
}

fn mukai(r: &mut Report, x: &Bundle, xp: &Bundle) -> Result<(), PipelineError> {
    let s = r.section("quantum corrections");
    for b in [x, xp] {
        s.assert(format!("qc tensor of {} is zero", b.name), b.qc_tensor()?.is_zero(), "");
        s.assert(
            format!("corrected ring of {} equals the classical ring", b.name),
            b.corrected()? == b.classical()?,
            "",
        );
    }
    let s = r.section("isomorphism");
    let rep = solve_diagonal(&x.corrected()?, &xp.corrected()?)?;
    s.expect("diagonal solver verdict", Verdict::Solved, rep.verdict);
    let identity = DiagonalMap::identity(x.basis.len());
    s.assert(
        "witness is the identity",
        rep.diagonal_witness() == Some(&identity),
        describe(&rep, &x.names()),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{emit_report, Format};

    #[test]
    fn every_fixture_passes() {
        for name in FIXTURE_NAMES {
            let r = run_fixture(name, &[]).unwrap();
            assert!(r.passed(), "{}", emit_report(&r, Format::Text));
        }
    }

    #[test]
    fn unknown_names_and_overrides() {
        assert!(matches!(run_fixture("nope", &[]), Err(FixtureError::UnknownFixture(_))));
        assert!(run_fixture("local_cy_genus_g", &[("h".into(), "1".into())]).is_err());
        let r = run_fixture("local_cy_genus_g", &[("g".into(), "3".into())]).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn dumped_files_match_embedded_text() {
        let dir = tempfile::tempdir().unwrap();
        let paths = dump_fixtures(dir.path()).unwrap();
        assert_eq!(paths.len(), FIXTURE_FILES.len());
        for (p, f) in paths.iter().zip(&FIXTURE_FILES) {
            assert_eq!(std::fs::read_to_string(p).unwrap(), f.text);
            crate::bundle::parse_bundle(p).unwrap();
        }
    }
}
