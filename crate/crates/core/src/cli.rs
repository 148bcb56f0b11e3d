//! Command line front-end: `build`, `count`, `verify`, `collapse`, `export`.
//!
//! Exit codes: 0 when everything passed, 1 when a check failed, 2 for usage
//! and parse errors.

use crate::complex::{
    build, chromatic_check, cone_check, enumerate_top, path_profile, structural_checks, Complex,
    ComplexCache,
};
use crate::counting::f_top;
use crate::decomposition::{
    strata_partition, verify_all_strata, verify_diagrams, verify_incidence,
};
use crate::report::Report;
use crate::rounds::RoundCounter;
use crate::topology::{collapse_to_point, homology_gf2, is_point, validate_collapse};
use crate::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

/// Every check `verify` knows, in output order.
pub const CHECKS: &[&str] = &[
    "pure",
    "pseudo",
    "connected",
    "reconstruction",
    "incidence",
    "strata",
    "diagrams",
    "partition",
    "collapse",
    "homology",
    "chromatic",
    "cone",
    "path",
];

#[derive(Parser, Debug)]
#[command(
    name = "snapcx",
    version,
    about = "Immediate snapshot complexes from round counters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build P(r) and print its f-vector; `--out` writes the complex as JSON.
    Build {
        #[arg(long, allow_hyphen_values = true)]
        counter: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the top-simplex recursion with direct enumeration.
    Count {
        #[arg(long, allow_hyphen_values = true)]
        counter: String,
    },
    /// Run structural checks.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        counter: String,
        /// Comma separated subset of the known checks (default: all).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Collapse P(r) to a vertex and write the validated step list.
    Collapse {
        #[arg(long, allow_hyphen_values = true)]
        counter: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print P(r) as JSON or as its dual graph in DOT.
    Export {
        #[arg(long, allow_hyphen_values = true)]
        counter: String,
        #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
        format: ExportFormat,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Json,
    Dot,
}

/// Parsed invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub counter: RoundCounter,
    pub checks: Vec<String>,
    pub out: Option<PathBuf>,
}

/// Parse the counter argument and the check list. Unknown checks are
/// rejected here, before any work is done.
pub fn configure(
    counter: &str,
    checks: &[String],
    out: Option<PathBuf>,
) -> crate::Result<RunConfig> {
    let counter = RoundCounter::parse(counter)?;
    let checks = if checks.is_empty() {
        CHECKS.iter().map(|c| c.to_string()).collect()
    } else {
        for c in checks {
            if !CHECKS.contains(&c.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "unknown check {c:?}; known checks: {}",
                    CHECKS.join(",")
                )));
            }
        }
        CHECKS
            .iter()
            .filter(|c| checks.iter().any(|x| x == *c))
            .map(|c| c.to_string())
            .collect()
    };
    Ok(RunConfig {
        counter,
        checks,
        out,
    })
}

/// Run one named check; a check that does not apply yields a skipped report.
pub fn run_check(
    name: &str,
    r: &RoundCounter,
    cache: &mut ComplexCache,
) -> crate::Result<Vec<Report>> {
    let params = json!({"counter": r.to_string()});
    let k = cache.get(r);
    let structural = |field: fn(&crate::complex::StructuralReport) -> bool, label: &str| {
        let s = structural_checks(&k);
        if field(&s) {
            Report::pass(name, params.clone())
        } else {
            let witness = s
                .counterexample
                .filter(|(n, _)| n == label)
                .map(|(_, key)| key)
                .unwrap_or_else(|| label.to_string());
            Report::fail(name, params.clone(), witness)
        }
    };
    let reports = match name {
        "pure" => vec![structural(|s| s.pure, "pure")],
        "pseudo" => vec![
            structural(|s| s.pseudomanifold, "pseudomanifold"),
            Report {
                check: "boundary".into(),
                ..structural(|s| s.boundary_matches, "boundary")
            },
        ],
        "connected" => vec![structural(|s| s.strongly_connected, "connected")],
        "reconstruction" => vec![structural(|s| s.reconstruction_injective, "reconstruction")],
        "incidence" => verify_incidence(r, cache),
        "strata" => vec![verify_all_strata(r, cache)?],
        "diagrams" => verify_diagrams(r, cache)?,
        "partition" => strata_partition(&k)?,
        "collapse" if r.is_empty() => vec![Report::skip(name, params, "empty counter")],
        "collapse" => vec![collapse_report(&k, params)],
        "homology" if r.is_empty() => vec![Report::skip(name, params, "empty counter")],
        "homology" => {
            let h = homology_gf2(&k);
            if h.is_acyclic_point() && h.euler == 1 {
                vec![Report::pass(name, params)]
            } else {
                vec![Report::fail(
                    name,
                    params,
                    format!("betti={:?} euler={}", h.betti, h.euler),
                )]
            }
        }
        "chromatic" if !r.is_binary() => {
            vec![Report::skip(name, params, "counter is not 0/1-valued")]
        }
        "chromatic" => {
            if chromatic_check(r)? {
                vec![Report::pass(name, params)]
            } else {
                vec![Report::fail(
                    name,
                    params,
                    "simplex set differs from colored ordered partitions",
                )]
            }
        }
        "cone" => {
            let zeros: Vec<_> = r.pass().iter().collect();
            if zeros.is_empty() {
                vec![Report::skip(name, params, "no passive process")]
            } else {
                let mut out = Vec::new();
                for n in zeros {
                    let p = json!({"counter": r.to_string(), "apex": n});
                    out.push(if cone_check(r, n)? {
                        Report::pass(name, p)
                    } else {
                        Report::fail(name, p, format!("not a cone with apex process {n}"))
                    });
                }
                out
            }
        }
        "path" if k.dim() != 1 || r.supp().len() != 2 => {
            vec![Report::skip(
                name,
                params,
                "not a one-dimensional two-process complex",
            )]
        }
        "path" => {
            let p = path_profile(&k)?;
            if p.ok {
                vec![Report::pass(name, params)]
            } else {
                let ends: Vec<String> = p.endpoints.iter().map(|t| t.key()).collect();
                vec![Report::fail(
                    name,
                    params,
                    format!("endpoints {}", ends.join(" ")),
                )]
            }
        }
        other => return Err(Error::InvalidArgument(format!("unknown check {other:?}"))),
    };
    Ok(reports)
}

fn collapse_report(k: &Complex, params: serde_json::Value) -> Report {
    match collapse_to_point(k.counter()) {
        Err(e) => Report::fail("collapse", params, e.to_string()),
        Ok(seq) => {
            let v = validate_collapse(k, &seq);
            let expected = (k.len() - 2) / 2;
            if !v.ok {
                let at = v
                    .first_illegal
                    .map(|i| format!("step {i}: "))
                    .unwrap_or_default();
                Report::fail(
                    "collapse",
                    params,
                    format!("{at}{}", v.reason.unwrap_or_default()),
                )
            } else if !is_point(&seq) {
                Report::fail(
                    "collapse",
                    params,
                    format!("{} simplices left", seq.residual.len()),
                )
            } else if seq.steps.len() != expected {
                Report::fail(
                    "collapse",
                    params,
                    format!("{} steps, expected {expected}", seq.steps.len()),
                )
            } else {
                Report::pass("collapse", params)
            }
        }
    }
}

fn f_vector_text(k: &Complex) -> String {
    let parts: Vec<String> = k.f_vector().counts.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

fn write_file(path: &PathBuf, text: &str) -> std::result::Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Run with argv (program name first), writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Run(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

/// Run with the given argv on stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let io = |e: std::io::Error| Failure::Run(e.to_string());
    match cli.command {
        Command::Build { counter, out: path } => {
            let cfg = configure(&counter, &[], path)?;
            let k = build(&cfg.counter);
            writeln!(out, "counter {}", cfg.counter).map_err(io)?;
            writeln!(out, "dimension {}", k.dim()).map_err(io)?;
            writeln!(out, "f-vector {}", f_vector_text(&k)).map_err(io)?;
            writeln!(out, "euler {}", k.f_vector().euler()).map_err(io)?;
            if let Some(p) = &cfg.out {
                write_file(p, &format!("{}\n", k.to_json())).map_err(Failure::Run)?;
            }
            Ok(0)
        }
        Command::Count { counter } => {
            let r = RoundCounter::parse(&counter)?;
            let values: Vec<u32> = r.values();
            let recursion = f_top(&values)?;
            let enumeration = enumerate_top(&r).len() as u64;
            let verdict = if recursion == enumeration {
                "ok"
            } else {
                "mismatch"
            };
            writeln!(
                out,
                "recursion={recursion} enumeration={enumeration} {verdict}"
            )
            .map_err(io)?;
            Ok(if recursion == enumeration { 0 } else { 1 })
        }
        Command::Verify {
            counter,
            checks,
            format,
        } => {
            let cfg = configure(&counter, &checks, None)?;
            let mut cache = ComplexCache::new();
            let mut failed: Option<Report> = None;
            for name in &cfg.checks {
                for rep in run_check(name, &cfg.counter, &mut cache)? {
                    match format {
                        ReportFormat::Json => writeln!(out, "{}", rep.to_json_line()),
                        ReportFormat::Text => {
                            let status = match (&rep.skipped, rep.ok) {
                                (Some(why), _) => format!("skip  {why}"),
                                (None, true) => "pass".to_string(),
                                (None, false) => {
                                    format!(
                                        "FAIL  {}",
                                        rep.counterexample.clone().unwrap_or_default()
                                    )
                                }
                            };
                            let params =
                                if rep.params == json!({"counter": cfg.counter.to_string()}) {
                                    String::new()
                                } else {
                                    format!(" {}", rep.params)
                                };
                            writeln!(out, "{:<20} {status}{params}", rep.check)
                        }
                    }
                    .map_err(io)?;
                    if !rep.ok && failed.is_none() {
                        failed = Some(rep);
                    }
                }
            }
            if let (Some(f), ReportFormat::Text) = (&failed, format) {
                writeln!(
                    out,
                    "first counterexample: {} {}",
                    f.check,
                    f.counterexample.clone().unwrap_or_default()
                )
                .map_err(io)?;
            }
            Ok(if failed.is_some() { 1 } else { 0 })
        }
        Command::Collapse { counter, out: path } => {
            let cfg = configure(&counter, &[], path)?;
            let k = build(&cfg.counter);
            let seq = collapse_to_point(&cfg.counter)?;
            let v = validate_collapse(&k, &seq);
            let text = format!("{}\n", seq.to_json());
            match &cfg.out {
                Some(p) => {
                    write_file(p, &text).map_err(Failure::Run)?;
                    let verdict = if v.ok { "valid" } else { "invalid" };
                    writeln!(
                        out,
                        "steps={} residual={} {verdict}",
                        seq.steps.len(),
                        seq.residual.len()
                    )
                    .map_err(io)?;
                }
                None => write!(out, "{text}").map_err(io)?,
            }
            Ok(if v.ok { 0 } else { 1 })
        }
        Command::Export { counter, format } => {
            let r = RoundCounter::parse(&counter)?;
            let k = build(&r);
            match format {
                ExportFormat::Json => writeln!(out, "{}", k.to_json()),
                ExportFormat::Dot => write!(out, "{}", k.to_dot()),
            }
            .map_err(io)?;
            Ok(0)
        }
    }
}
