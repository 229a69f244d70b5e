use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use turnover::atlas::{enumerate_isolated_classes, hyperbolic_cusp_holonomy, slice_polar, slice_representation, EXPECTED_ISOLATED_POINTS};
use turnover::character::{coordinate_words, rational_grid, sample_surface, write_surface_csv, SignPattern};
use turnover::cohomology::{cohomology_report, ModuleKind};
use turnover::cusp::{classify_end, faithfulness_obstruction, Faithfulness};
use turnover::group::Word;
use turnover::linalg::{Matrix, Scalar, DEFAULT_EIGEN_TOL, DEFAULT_RANK_TOL, Q3};
use turnover::report::verify_all;

/// Directory used for output files when `--out` is not given.
const OUT_DIR_VAR: &str = "TURNOVER_OUT_DIR";

#[derive(Parser)]
#[command(name = "turnover", version, about = "Holonomy and character-variety checks for the (3,3,3) turnover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check and write a JSON report.
    VerifyPaper {
        /// Base float tolerance; float thresholds scale with it.
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Twisted cohomology of a Euclidean turnover's cusp holonomy.
    Cohomology {
        #[arg(long, value_parser = parse_orders, default_value = "3,3,3")]
        orders: [u32; 3],
        #[arg(long, default_value = "adjoint")]
        module: ModuleKind,
    },
    /// Images, end verdict and relator residuals on the slice.
    Slice {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "polar", requires = "v")]
        u: Option<f64>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "polar", requires = "u")]
        v: Option<f64>,
        /// `t,theta` with `(u, v) = t(cos 3θ, sin 3θ)`.
        #[arg(long, value_parser = parse_pair, conflicts_with_all = ["u", "v"], allow_hyphen_values = true)]
        polar: Option<(f64, f64)>,
    },
    /// Sample the surface over an exact grid and write CSV.
    Surface {
        /// `lo:hi:n`, with rational endpoints.
        #[arg(long, value_parser = parse_grid, default_value = "1/2:2:4")]
        grid: (BigRational, BigRational, usize),
        /// Comma-separated sign patterns for `(x₁, x₂)`, or `all`.
        #[arg(long, value_parser = parse_signs, default_value = "all", allow_hyphen_values = true)]
        signs: Signs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the isolated characters.
    Isolated {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

enum Failure {
    /// A mathematical check failed.
    Check(String),
    /// Bad input or I/O.
    Usage(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

fn parse_orders(s: &str) -> Result<[u32; 3], String> {
    let parts: Vec<u32> = s.split(',').map(|p| p.trim().parse::<u32>().map_err(|e| format!("{p:?}: {e}"))).collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| "expected three comma-separated orders".to_string())
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected t,theta")?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_grid(s: &str) -> Result<(BigRational, BigRational, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err("expected lo:hi:n".into());
    };
    let rational = |x: &str| x.trim().parse::<BigRational>().map_err(|e| format!("{x:?}: {e}"));
    let n = n.trim().parse::<usize>().map_err(|e| format!("{n:?}: {e}"))?;
    Ok((rational(lo)?, rational(hi)?, n))
}

#[derive(Clone)]
struct Signs(Vec<SignPattern>);

fn parse_signs(s: &str) -> Result<Signs, String> {
    if s == "all" {
        return Ok(Signs(SignPattern::ALL.to_vec()));
    }
    s.split(',').map(|p| p.trim().parse::<SignPattern>().map_err(|e| e.to_string())).collect::<Result<_, _>>().map(Signs)
}

/// `--out` if given, otherwise `default_name` inside the output directory
/// variable if set, otherwise standard output.
fn destination(out: Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    out.or_else(|| std::env::var_os(OUT_DIR_VAR).map(|dir| Path::new(&dir).join(default_name)))
}

fn emit(bytes: &[u8], dest: Option<&Path>) -> Result<(), Failure> {
    match dest {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn pretty(v: &impl serde::Serialize) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn check<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Check(e.to_string())
}

fn matrix_json<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(Scalar::to_json).collect())).collect())
}

fn verify(tol: f64, out: Option<PathBuf>, format: Format) -> Result<(), Failure> {
    if tol.is_nan() || tol <= 0.0 || !tol.is_finite() {
        return Err(Failure::Usage(format!("--tol must be a positive number, got {tol}")));
    }
    let report = verify_all(tol).map_err(check)?;
    let json = pretty(&report);
    if let Some(path) = destination(out, "verification-report.json") {
        emit(&json, Some(&path))?;
    }
    match format {
        Format::Json => emit(&json, None)?,
        Format::Text => {
            let mut text = String::new();
            for c in &report.checks {
                let status = match (c.kind, c.passed) {
                    (turnover::report::CheckKind::Observation, _) => "NOTE",
                    (_, true) => "PASS",
                    (_, false) => "FAIL",
                };
                text.push_str(&format!("{status} {:<30} {}\n", c.id, c.computed));
            }
            let s = &report.summary;
            text.push_str(&format!("{} of {} checks passed, {} failed\n", s.passed, s.total, s.failed));
            emit(text.as_bytes(), None)?;
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        let ids: Vec<&str> = report.failures().map(|c| c.id.as_str()).collect();
        Err(Failure::Check(format!("failed checks: {}", ids.join(", "))))
    }
}

fn cohomology(orders: [u32; 3], module: ModuleKind) -> Result<(), Failure> {
    let rho = hyperbolic_cusp_holonomy::<Q3>(orders[0], orders[1], orders[2]).map_err(check)?;
    let report = cohomology_report(&rho, module, None).map_err(check)?;
    emit(&pretty(&report), None)
}

fn slice(u: Option<f64>, v: Option<f64>, polar: Option<(f64, f64)>) -> Result<(), Failure> {
    let (u, v) = match polar {
        Some((t, theta)) => slice_polar(t, theta),
        None => (u.unwrap_or(0.0), v.unwrap_or(0.0)),
    };
    if !u.is_finite() || !v.is_finite() {
        return Err(Failure::Usage(format!("slice parameters must be finite, got ({u}, {v})")));
    }
    let psi = slice_representation(u, v).map_err(check)?;
    let relations = psi.verify_relations(Some(DEFAULT_RANK_TOL)).map_err(check)?;
    let verdict = classify_end(&psi, DEFAULT_EIGEN_TOL).map_err(check)?;
    let a2b: Word = "aab".parse().expect("literal word");
    let doc = json!({
        "u": u,
        "v": v,
        "image_a": matrix_json(psi.image_a()),
        "image_b": matrix_json(psi.image_b()),
        "image_a2b": matrix_json(&psi.evaluate_word(&a2b)),
        "verdict": verdict,
        "relations": relations,
    });
    emit(&pretty(&doc), None)?;
    if relations.passed {
        Ok(())
    } else {
        Err(Failure::Check(format!("relator residual {:e} exceeds tolerance", relations.max_deviation())))
    }
}

fn surface(grid: (BigRational, BigRational, usize), Signs(signs): Signs, out: Option<PathBuf>) -> Result<(), Failure> {
    let (lo, hi, n) = grid;
    if lo <= BigRational::from_integer(0.into()) {
        return Err(Failure::Usage("grid magnitudes must be positive".into()));
    }
    let magnitudes = rational_grid(&lo, &hi, n).map_err(|e| Failure::Usage(e.to_string()))?;
    let points = sample_surface(&magnitudes, &signs, None).map_err(check)?;
    let mut csv = Vec::new();
    write_surface_csv(&points, &mut csv).map_err(|e| Failure::Usage(e.to_string()))?;
    emit(&csv, destination(out, "surface.csv").as_deref())?;
    if points.iter().all(|p| p.residual.is_zero()) {
        Ok(())
    } else {
        Err(Failure::Check("nonzero surface residual".into()))
    }
}

fn isolated(out: Option<PathBuf>) -> Result<(), Failure> {
    let enumeration = enumerate_isolated_classes().map_err(check)?;
    let words = coordinate_words();
    let entries: Vec<Value> = enumeration
        .off_surface()
        .map(|c| {
            let rho = &c.representation;
            let traces: serde_json::Map<String, Value> =
                words.iter().map(|w| (w.to_string(), rho.evaluate_word(w).trace().expect("square").to_json())).collect();
            let witness = match faithfulness_obstruction(rho, None).expect("exact backend") {
                Faithfulness::NotFaithful { witness } => Value::String(witness),
                Faithfulness::NoObstructionFound => Value::Null,
            };
            json!({
                "case": c.case,
                "label": c.label(),
                "orbit_size": c.orbit_size,
                "image_a": matrix_json(rho.image_a()),
                "image_b": matrix_json(rho.image_b()),
                "traces": traces,
                "not_faithful_witness": witness,
            })
        })
        .collect();
    let found = entries.len();
    let doc = json!({
        "expected": EXPECTED_ISOLATED_POINTS,
        "found": found,
        "tallies_by_case": enumeration.tallies,
        "distinct_trace_vectors": enumeration.distinct_trace_vectors,
        "entries": entries,
    });
    emit(&pretty(&doc), destination(out, "isolated.json").as_deref())?;
    if found == EXPECTED_ISOLATED_POINTS {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "expected {EXPECTED_ISOLATED_POINTS} isolated classes, found {found} (by case {:?}, {} distinct trace vectors)",
            enumeration.tallies, enumeration.distinct_trace_vectors
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::VerifyPaper { tol, out, format } => verify(tol, out, format),
        Command::Cohomology { orders, module } => cohomology(orders, module),
        Command::Slice { u, v, polar } => slice(u, v, polar),
        Command::Surface { grid, signs, out } => surface(grid, signs, out),
        Command::Isolated { out } => isolated(out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let (Failure::Check(msg) | Failure::Usage(msg)) = &failure;
            eprintln!("turnover: {msg}");
            ExitCode::from(failure.exit_code())
        }
    }
}
