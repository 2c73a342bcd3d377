//! `fri`: batch front end for the interpolation toolkit.
//!
//! Exit codes: 0 success, 1 validation or inference failure, 2 usage error,
//! 3 I/O error. With `--out json` errors are also reported as a JSON object
//! on stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fri_core::analysis::{compare_methods, evaluate_method, ComparisonMatrix, ComparisonRow};
use fri_core::bench::{run_suite, write_artifacts, write_svg, SearchBudget};
use fri_core::fis::{parse_fis, parse_observation, write_csv};
use fri_core::fuzzy::uniform_levels;
use fri_core::rulebase::validate_rulebase;
use fri_core::{interpolate, ConclusionForm, InterpolationConfig, MethodId, Observation, RuleBase};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fri", version, about = "Fuzzy rule interpolation over sparse rule bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a rule-base file.
    Check {
        #[arg(long)]
        fis: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        out: Format,
    },
    /// Run one method (or `all`) on an observation.
    Infer(InferArgs),
    /// Run every method and print the verdict matrix.
    Compare(CompareArgs),
    /// Regenerate the example suite and write its artifacts.
    Bench {
        #[arg(long, default_value = "table1")]
        suite: String,
        #[arg(long)]
        out: PathBuf,
        /// Overridden by the FRI_SEED environment variable.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Draw the rule base, the observation and one method's conclusion.
    Plot {
        #[arg(long)]
        fis: PathBuf,
        #[arg(long)]
        obs: PathBuf,
        #[arg(long)]
        method: MethodId,
        #[arg(long)]
        svg: PathBuf,
    },
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    fis: PathBuf,
    #[arg(long)]
    obs: PathBuf,
    /// Evenly spaced cut levels for the alpha-cut methods.
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    out: Format,
    /// Weight consequents by their own distances, as printed, in KH.
    #[arg(long)]
    paper_literal_kh: bool,
}

#[derive(Args)]
struct InferArgs {
    /// A method token such as KH or SCALE_MOVE, or `all`.
    #[arg(long)]
    method: String,
    #[command(flatten)]
    common: CompareArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

/// A failure with its exit code and a stable code string.
struct Failure {
    exit: u8,
    code: String,
    message: String,
    /// Extra payload for the JSON form, e.g. a validation report.
    detail: Option<serde_json::Value>,
}

impl Failure {
    fn new(exit: u8, code: impl Into<String>, message: impl Into<String>) -> Self {
        Failure { exit, code: code.into(), message: message.into(), detail: None }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::new(3, "IoError", format!("{}: {e}", path.display()))
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(2, "UsageError", message)
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: &'a str,
    exit: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: &'a Option<serde_json::Value>,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: ErrorBody<'a>,
}

fn report(f: &Failure, json: bool) -> ExitCode {
    if json {
        let body = ErrorJson { error: ErrorBody { code: &f.code, message: &f.message, exit: f.exit, detail: &f.detail } };
        eprintln!("{}", serde_json::to_string(&body).expect("error payload serialises"));
    } else {
        eprintln!("error[{}]: {}", f.code, f.message);
    }
    ExitCode::from(f.exit)
}

/// Whether the raw arguments ask for JSON output; used before parsing
/// succeeds so usage errors can be reported in the requested form.
fn wants_json(args: &[String]) -> bool {
    args.windows(2).any(|w| w[0] == "--out" && w[1].eq_ignore_ascii_case("json"))
        || args.iter().any(|a| a.eq_ignore_ascii_case("--out=json"))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let json = wants_json(&args);
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if json {
                return report(&Failure::usage(e.kind().to_string()), true);
            }
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => report(&f, json),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn load_rulebase(path: &Path) -> Result<RuleBase, Failure> {
    let doc = parse_fis(&read(path)?).map_err(|e| Failure::new(1, e.code(), format!("{}: {e}", path.display())))?;
    doc.to_rulebase().map_err(|e| Failure::new(1, e.code(), format!("{}: {e}", path.display())))
}

fn load_valid_rulebase(path: &Path) -> Result<RuleBase, Failure> {
    let rb = load_rulebase(path)?;
    let v = validate_rulebase(&rb, &[]);
    if !v.is_valid() {
        let mut f = Failure::new(1, "InvalidRuleBase", v.issues().cloned().collect::<Vec<_>>().join("; "));
        f.detail = serde_json::to_value(&v).ok();
        return Err(f);
    }
    Ok(rb)
}

fn load_observation(path: &Path) -> Result<Observation, Failure> {
    parse_observation(&read(path)?).map_err(|e| Failure::new(1, e.code(), format!("{}: {e}", path.display())))
}

fn config(args: &CompareArgs) -> Result<InterpolationConfig, Failure> {
    let mut cfg = InterpolationConfig { paper_literal_kh: args.paper_literal_kh, ..Default::default() };
    if let Some(n) = args.levels {
        if n < 2 {
            return Err(Failure::usage("--levels needs at least 2 levels"));
        }
        cfg.alpha_levels = Some(uniform_levels(n));
    }
    Ok(cfg)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialises");
    s.push('\n');
    s
}

fn csv(rows: &[&ComparisonRow], example: &str) -> String {
    let rows: Vec<_> = rows.iter().map(|r| r.to_report_row(example)).collect();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn example_name(obs: &Path) -> String {
    obs.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn verdict(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    }
}

fn row_text(row: &ComparisonRow) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "method: {}", row.method);
    let _ = writeln!(s, "status: {}", row.status);
    if let Some(e) = &row.error {
        let _ = writeln!(s, "error: {e}");
    }
    if let Some(c) = &row.conclusion {
        match &c.form {
            ConclusionForm::Shape(set) => {
                let _ = writeln!(s, "form: shape");
                let _ = writeln!(s, "conclusion: {set}");
            }
            ConclusionForm::AlphaFamily(cuts) => {
                let _ = writeln!(s, "form: alpha-family");
                if let Some(set) = c.to_shape() {
                    let _ = writeln!(s, "conclusion: {set}");
                }
                for k in cuts {
                    let _ = writeln!(s, "  alpha={} inf={} sup={}", k.alpha, k.inf, k.sup);
                }
            }
        }
        for n in &c.notes {
            let _ = writeln!(s, "note: {n}");
        }
    }
    let _ = writeln!(s, "abnormal: {}", verdict(row.abnormal()));
    if let Some(a) = &row.abnormality {
        if let (Some(alpha), Some(kind)) = (a.first_violation_alpha, a.violation_kind) {
            let _ = writeln!(s, "first violation: {kind:?} at alpha={alpha}");
        }
    }
    let _ = writeln!(s, "piecewise linear: {}", verdict(row.linear()));
    s
}

fn matrix_text(m: &ComparisonMatrix) -> String {
    let mut s = format!("{:<11} {:<24} {:<9} {}\n", "method", "status", "abnormal", "linear");
    for r in &m.rows {
        let _ = writeln!(s, "{:<11} {:<24} {:<9} {}", r.method.token(), r.status, verdict(r.abnormal()), verdict(r.linear()));
    }
    s
}

fn compare(args: &CompareArgs) -> Result<String, Failure> {
    let cfg = config(args)?;
    let rb = load_valid_rulebase(&args.fis)?;
    let obs = load_observation(&args.obs)?;
    let m = compare_methods(&rb, &obs, &MethodId::ALL, &cfg);
    Ok(match args.out {
        Format::Text => matrix_text(&m),
        Format::Csv => csv(&m.rows.iter().collect::<Vec<_>>(), &example_name(&args.obs)),
        Format::Json => to_json(&m),
    })
}

fn infer(args: &InferArgs) -> Result<String, Failure> {
    if args.method.eq_ignore_ascii_case("all") {
        return compare(&args.common);
    }
    let method: MethodId = args.method.parse().map_err(Failure::usage)?;
    let a = &args.common;
    let cfg = config(a)?;
    let rb = load_valid_rulebase(&a.fis)?;
    let obs = load_observation(&a.obs)?;
    let row = evaluate_method(method, &rb, &obs, &cfg);
    if row.status != "ok" {
        let code = row.status.trim_start_matches("error:").to_string();
        return Err(Failure::new(1, code, row.error.clone().unwrap_or_default()));
    }
    Ok(match a.out {
        Format::Text => row_text(&row),
        Format::Csv => csv(&[&row], &example_name(&a.obs)),
        Format::Json => to_json(&row),
    })
}

fn run(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Check { fis, out } => {
            let rb = load_rulebase(&fis)?;
            let v = validate_rulebase(&rb, &[]);
            let text = match out {
                Format::Json => to_json(&serde_json::json!({ "valid": v.is_valid(), "report": v })),
                _ if v.is_valid() => format!("valid: {} inputs, {} rules\n", rb.dims(), rb.rules.len()),
                _ => String::new(),
            };
            if v.is_valid() {
                return Ok(text);
            }
            let mut f = Failure::new(1, "InvalidRuleBase", v.issues().cloned().collect::<Vec<_>>().join("; "));
            f.detail = serde_json::to_value(&v).ok();
            Err(f)
        }
        Command::Infer(args) => infer(&args),
        Command::Compare(args) => compare(&args),
        Command::Bench { suite, out, seed, budget } => {
            if suite != "table1" {
                return Err(Failure::usage(format!("unknown suite '{suite}'; only table1 exists")));
            }
            let seed = match std::env::var("FRI_SEED") {
                Ok(s) => s.trim().parse().map_err(|_| Failure::usage(format!("FRI_SEED is not a seed: '{s}'")))?,
                Err(_) => seed,
            };
            let budget = SearchBudget { max_samples: budget, seed };
            let cfg = InterpolationConfig::default();
            let report = run_suite(&MethodId::ALL, seed, &budget, &cfg).expect("suite ids are valid");
            write_artifacts(&report, &out).map_err(|e| Failure::new(3, "IoError", format!("{}: {e}", out.display())))?;
            let mut s = String::new();
            for r in &report.searches {
                let _ = writeln!(s, "example{} {}: {}", r.example_id, r.target, r.verdict());
            }
            let _ = writeln!(s, "cells: {}", report.cells.len());
            if report.mismatches.is_empty() {
                let _ = writeln!(s, "mismatches: 0");
                Ok(s)
            } else {
                print!("{s}");
                Err(Failure::new(1, "SuiteMismatch", report.mismatches.join("; ")))
            }
        }
        Command::Plot { fis, obs, method, svg } => {
            let rb = load_valid_rulebase(&fis)?;
            let o = load_observation(&obs)?;
            let c = interpolate(method, &rb, &o, &InterpolationConfig::default())
                .map_err(|e| Failure::new(1, e.code(), e.to_string()))?;
            write_svg(&rb, &o, Some(&c), &svg).map_err(|e| Failure::io(&svg, e))?;
            Ok(format!("wrote {}\n", svg.display()))
        }
    }
}
