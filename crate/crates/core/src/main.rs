use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use umemura::binform::BinaryForm;
use umemura::birgeom::{are_conjugate, decide_maximality};
use umemura::error::Error;
use umemura::fibration::build_fibration;
use umemura::parse::parse_form;
use umemura::pgl2equiv::VerdictResult;
use umemura::report::{analyze, census_report, link_report, resolve_report};

const EXIT_INVALID: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "umemura",
    version,
    about = "Exact analysis of Umemura quadric fibrations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Full report: decomposition, singularities, resolutions, links, maximality.
    Analyze,
    /// Maximality verdict with its certificate.
    Maximality,
    /// Compare two fibrations up to conjugacy (needs --form2).
    Conjugate,
    /// Resolution ledgers and extraction classification per singular point.
    Resolve,
    /// Links out of the fibration, each validated.
    Links,
    /// Automorphism profile and orbit census.
    Census,
}

#[derive(clap::Args)]
struct Options {
    /// Fiber dimension (at least 3).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// The form g: an expression in t0, t1 or a JSON coefficient array.
    #[arg(long, global = true)]
    form: Option<String>,
    /// Second form, for `conjugate`.
    #[arg(long, global = true)]
    form2: Option<String>,
    /// Largest weight b tried by the extraction classifier.
    #[arg(long, global = true, default_value_t = 6)]
    bmax: u32,
    /// Bit cap for certified root isolation and interval arithmetic.
    #[arg(
        long,
        global = true,
        env = "UMEMURA_PRECISION_CAP",
        default_value_t = 4096
    )]
    precision_cap: u32,
    /// Write the JSON here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Indent the JSON and print a short summary on standard error.
    #[arg(long, global = true)]
    pretty: bool,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

struct Output {
    json: serde_json::Value,
    summary: String,
    undecided: bool,
}

fn to_value(v: &impl Serialize) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, Failure> {
    v.as_deref()
        .ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}

fn inputs(o: &Options) -> Result<(usize, BinaryForm), Failure> {
    let n = o.n.ok_or_else(|| Failure::Usage("missing --n".into()))?;
    Ok((n, parse_form(required(&o.form, "form")?)?))
}

fn run(cmd: Command, o: &Options) -> Result<Output, Failure> {
    let cap = o.precision_cap;
    let (n, g) = inputs(o)?;
    let out = |json, summary: String| Output {
        json,
        summary,
        undecided: false,
    };
    Ok(match cmd {
        Command::Analyze => {
            let r = analyze(n, &g, cap)?;
            let summary = format!(
                "n = {n}, g = {g}: {} singular point(s), h = {}, {:?}",
                r.singular_locus.len(),
                r.decomposition.h.coefficients.join(" "),
                r.maximality.verdict
            );
            out(to_value(&r), summary)
        }
        Command::Maximality => {
            let v = decide_maximality(&build_fibration(n, &g, cap)?, cap)?;
            let summary = format!(
                "{:?} ({:?}, {:?})",
                v.verdict, v.certificate.reason, v.basis
            );
            out(to_value(&v), summary)
        }
        Command::Conjugate => {
            let g2 = parse_form(required(&o.form2, "form2")?)?;
            let v = are_conjugate(
                &build_fibration(n, &g, cap)?,
                &build_fibration(n, &g2, cap)?,
                cap,
            )?;
            let result = v.equivalence.result;
            let summary = format!("{result:?} ({:?})", v.equivalence.certificate_kind);
            Output {
                json: to_value(&v),
                summary,
                undecided: result == VerdictResult::UndecidedAtPrecision,
            }
        }
        Command::Resolve => {
            let r = resolve_report(n, &g, o.bmax, cap)?;
            let summary = r
                .resolution_ledgers
                .iter()
                .map(|l| {
                    format!(
                        "{}: k = {}, m = {}",
                        l.point.as_deref().unwrap_or("?"),
                        l.k,
                        l.m
                    )
                })
                .collect::<Vec<_>>()
                .join("; ");
            out(to_value(&r), summary)
        }
        Command::Links => {
            let r = link_report(&build_fibration(n, &g, cap)?, cap)?;
            let summary = format!(
                "{} link(s), exhaustive = {}",
                r.enumeration.links.len(),
                r.enumeration.exhaustive
            );
            out(to_value(&r), summary)
        }
        Command::Census => {
            let r = census_report(n, &g, cap)?;
            let summary = format!(
                "{} strata, horizontal part {}",
                r.orbit_census.strata.len(),
                r.aut_profile.horizontal
            );
            out(to_value(&r), summary)
        }
    })
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!(
        "{}",
        json!({ "error": { "kind": kind, "message": message } })
    );
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("Usage", e.to_string().trim_end().to_string(), EXIT_INVALID),
    };
    let o = &cli.opts;
    let output = match run(cli.command, o) {
        Ok(v) => v,
        Err(Failure::Usage(m)) => return fail("Usage", m, EXIT_INVALID),
        Err(Failure::Compute(e)) => {
            let code = match &e {
                Error::PrecisionExhausted { .. } => EXIT_UNDECIDED,
                e if e.is_invalid_input() => EXIT_INVALID,
                _ => 1,
            };
            return fail(e.kind(), e.to_string(), code);
        }
    };
    let text = if o.pretty {
        eprintln!("{}", output.summary);
        serde_json::to_string_pretty(&output.json)
    } else {
        serde_json::to_string(&output.json)
    }
    .expect("json");
    match &o.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                return fail("Io", e.to_string(), 1);
            }
        }
        None => {
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    if output.undecided {
        ExitCode::from(EXIT_UNDECIDED)
    } else {
        ExitCode::SUCCESS
    }
}
