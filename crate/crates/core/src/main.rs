use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crepant::algebra::{pairing_signature, GradedAlgebra, TripleTensor};
use crepant::bundle::{parse_bundle_file, parse_bundle_str, Bundle, BundleError, BundleFile, PipelineError};
use crepant::expr::{evaluate, Params};
use crepant::fixtures::{dump_fixtures, run_fixture, FixtureError};
use crepant::iso::{solve_diagonal, verify_map, Map, Structure, VerifyMode};
use crepant::report::{emit_report, Format, Report, Section};
use crepant::scalars::GaussRational;

#[derive(Parser)]
#[command(name = "crepant", version, about = "Exact checks of quantum-corrected cohomology rings")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Evaluation point of the quantum corrections. Only -1 is supported.
    #[arg(long, global = true, allow_hyphen_values = true, default_value = "-1")]
    q_value: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structure and associativity checks on a bundle's classical and corrected rings.
    Check {
        bundle: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
        overrides: Vec<(String, String)>,
    },
    /// Print the classical, correction and corrected triple tensors.
    Correct {
        bundle: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
        overrides: Vec<(String, String)>,
    },
    /// Look for a diagonal isomorphism from the corrected ring of A to that of B.
    /// A bundle without rays has corrected ring equal to its classical ring.
    Iso {
        bundle_a: PathBuf,
        bundle_b: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
        overrides: Vec<(String, String)>,
    },
    /// Run a bundled example end to end.
    Fixture {
        name: String,
        #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
        overrides: Vec<(String, String)>,
    },
    /// Write the bundled example files into a directory.
    DumpFixtures { dir: PathBuf },
}

fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Anything that stops a command before a report exists (exit status 2).
struct InputError(String);

impl From<BundleError> for InputError {
    fn from(e: BundleError) -> Self {
        InputError(e.to_string())
    }
}

impl From<PipelineError> for InputError {
    fn from(e: PipelineError) -> Self {
        InputError(e.to_string())
    }
}

impl From<crepant::algebra::AlgebraError> for InputError {
    fn from(e: crepant::algebra::AlgebraError) -> Self {
        InputError(e.to_string())
    }
}

impl From<FixtureError> for InputError {
    fn from(e: FixtureError) -> Self {
        InputError(e.to_string())
    }
}

fn load(path: &PathBuf, overrides: &[(String, String)]) -> Result<Bundle, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_bundle_str(&text, overrides).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// Loads two bundles, applying each override to whichever of them declares it.
fn load_pair(a: &PathBuf, b: &PathBuf, overrides: &[(String, String)]) -> Result<(Bundle, Bundle), InputError> {
    let read = |p: &PathBuf| -> Result<BundleFile, InputError> {
        let text = std::fs::read_to_string(p).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
        parse_bundle_file(&text).map_err(|e| InputError(format!("{}: {e}", p.display())))
    };
    let (fa, fb) = (read(a)?, read(b)?);
    if let Some((k, _)) = overrides
        .iter()
        .find(|(k, _)| !fa.parameters.contains_key(k) && !fb.parameters.contains_key(k))
    {
        return Err(InputError(format!("neither bundle declares parameter {k:?}")));
    }
    let pick = |f: &BundleFile| -> Vec<(String, String)> {
        overrides.iter().filter(|(k, _)| f.parameters.contains_key(k)).cloned().collect()
    };
    let (oa, ob) = (pick(&fa), pick(&fb));
    Ok((Bundle::resolve(fa, &oa)?, Bundle::resolve(fb, &ob)?))
}

fn ring_checks(s: &mut Section, label: &str, st: &Structure) {
    let ring: GradedAlgebra = match st {
        Structure::Algebra(a) => a.clone(),
        Structure::Cubic(c) => match c.frobenius_algebra() {
            Ok(a) => a,
            Err(e) => {
                s.assert(format!("{label}: Frobenius algebra of the cubic form"), false, e.to_string());
                return;
            }
        },
    };
    let structure = ring.check_structure();
    let detail: Vec<String> = structure.iter().take(3).map(|v| v.describe(ring.basis())).collect();
    s.assert(format!("{label}: graded, commutative, unital"), structure.is_empty(), detail.join("; "));
    let assoc = ring.check_associativity();
    let detail: Vec<String> = assoc.iter().take(3).map(|v| v.describe(ring.basis())).collect();
    s.assert(format!("{label}: associative"), assoc.is_empty(), detail.join("; "));
}

fn check(path: &PathBuf, overrides: &[(String, String)]) -> Result<Report, InputError> {
    let b = load(path, overrides)?;
    let mut r = Report::new(format!("check {}", b.name));
    if let (Some(p), None) = (&b.pairing, b.unit) {
        let s = r.section("pairing");
        let sig = pairing_signature(p.matrix())?;
        s.info("signature (positive,negative,zero)", sig, "no unit, so no ring checks");
        s.assert("nondegenerate", sig.zero == 0, "");
        return Ok(r);
    }
    let classical = b.classical()?;
    let corrected = b.corrected()?;
    let s = r.section("rings");
    ring_checks(s, "classical", &classical);
    ring_checks(s, "corrected", &corrected);
    Ok(r)
}

fn tensor_section(r: &mut Report, name: &str, b: &Bundle, t: &TripleTensor) {
    let names = b.names();
    let s = r.section(name);
    for (k, v) in t.entries() {
        s.info(format!("<{},{},{}>", names[k[0]], names[k[1]], names[k[2]]), v, "");
    }
}

fn correct(path: &PathBuf, overrides: &[(String, String)]) -> Result<Report, InputError> {
    let b = load(path, overrides)?;
    let mut r = Report::new(format!("correct {}", b.name));
    let qc = b.qc_tensor()?;
    let corrected = b.corrected_tensor()?;
    tensor_section(&mut r, "classical", &b, &b.triples);
    tensor_section(&mut r, "quantum correction at q = -1", &b, &qc);
    tensor_section(&mut r, "corrected", &b, &corrected);
    Ok(r)
}

fn iso(a: &PathBuf, b: &PathBuf, overrides: &[(String, String)]) -> Result<Report, InputError> {
    let (a, b) = load_pair(a, b, overrides)?;
    let mut r = Report::new(format!("iso {} -> {}", a.name, b.name));
    let names = a.names();
    let (source, target) = (a.corrected()?, b.corrected()?);
    let rep = solve_diagonal(&source, &target).map_err(|e| InputError(e.to_string()))?;
    let s = r.section("diagonal solver");
    let detail = match (&rep.witness, &rep.obstruction, &rep.numeric) {
        (Some(Map::Diagonal(d)), _, _) => names
            .iter()
            .zip(d.scalars())
            .map(|(n, v)| format!("{n} -> {v}"))
            .collect::<Vec<_>>()
            .join(", "),
        (_, Some(o), _) => o.describe(&names),
        (_, _, Some(n)) => format!("numeric witness with residual {:e}", n.residual),
        _ => String::new(),
    };
    s.assert(format!("verdict: {}", rep.verdict), rep.is_success(), detail);
    if !rep.kernel.is_empty() {
        s.info("free rescaling directions", rep.kernel.len(), "");
    }
    if let Some(m) = &a.candidate_map {
        let check = verify_map(&source, &target, &Map::Diagonal(m.clone()), VerifyMode::Products)
            .map_err(|e| InputError(e.to_string()))?;
        let detail = check.obstruction.as_ref().map(|o| o.describe(&names)).unwrap_or_default();
        s.info("candidate map from bundle A", check.verdict, detail);
    }
    Ok(r)
}

fn run(cli: Cli) -> Result<Report, InputError> {
    let q = evaluate(&cli.q_value, &Params::new()).map_err(|e| InputError(format!("--q-value: {e}")))?;
    if q != GaussRational::from_int(-1) {
        return Err(InputError(format!(
            "--q-value {}: only q = -1 is supported; the corrections diverge at q = 1 and other points are not meaningful here",
            cli.q_value
        )));
    }
    match &cli.command {
        Command::Check { bundle, overrides } => check(bundle, overrides),
        Command::Correct { bundle, overrides } => correct(bundle, overrides),
        Command::Iso {
            bundle_a,
            bundle_b,
            overrides,
        } => iso(bundle_a, bundle_b, overrides),
        Command::Fixture { name, overrides } => Ok(run_fixture(name, overrides)?),
        Command::DumpFixtures { dir } => {
            let paths = dump_fixtures(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
            let mut r = Report::new(format!("dump-fixtures {}", dir.display()));
            let s = r.section("files");
            for p in paths {
                s.info("wrote", p.display(), "");
            }
            Ok(r)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(report) => {
            print!("{}", emit_report(&report, format));
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
