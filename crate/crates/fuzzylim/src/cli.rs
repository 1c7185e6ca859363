//! Command-line front end.
//!
//! Subcommands: `limit` (compute and optionally certify a fuzzy limit),
//! `eval` (fuzzy arithmetic over an input number), `membership` (sample a
//! membership function as CSV), and `verify` (run the theorem suite and
//! stream reports as JSON lines).
//!
//! Exit codes for `limit`: 0 converged, 2 diverges, 3 no limit,
//! 4 undetermined, 1 usage or parse errors. `eval` adds 5 for evaluation
//! domain errors. `verify` exits 0 iff no report has status `Fails`.

use crate::eval::{eval_fuzzy, EvalMode};
use crate::expr::parse;
use crate::fuzzy::{AlphaGrid, FuzzyNumber, FuzzyNumberRepr};
use crate::limit::{
    certify, fuzzy_limit, ApproachSpec, Certificate, LimitConfig, NoLimitReason,
    Outcome, Side, Target,
};
use crate::theorems::{
    check_composition, check_limit_algebra, check_order_theorems, check_uniqueness_and_sides,
    run_fixture_suite, run_random_campaign, Status, SuiteSelection, TheoremReport,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::io::Read;
use std::time::Instant;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "fuzzylim", about = "Fuzzy arithmetic and certified fuzzy limits", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the fuzzy limit of an expression
    Limit(LimitArgs),
    /// Evaluate an expression over a fuzzy number
    Eval(EvalArgs),
    /// Sample a fuzzy number's membership function as CSV
    Membership(MembershipArgs),
    /// Run the theorem suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct LimitArgs {
    /// Expression text; "-" reads standard input
    #[arg(long)]
    expr: String,
    /// Target: fuzzy-number JSON, "inf", or "-inf"
    #[arg(long)]
    at: String,
    #[arg(long, default_value = "both")]
    side: String,
    /// paper | natural | rigorous[:depth]
    #[arg(long, default_value = "paper")]
    mode: String,
    /// α-grid points (falls back to FUZZY_LIMIT_LEVELS, then 101)
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated strictly decreasing ε list for certification
    #[arg(long)]
    certify: Option<String>,
    #[arg(long, default_value = "json")]
    format: String,
    /// Seed recorded for reproducibility
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    /// Expression text; "-" reads standard input
    #[arg(long)]
    expr: String,
    /// Input fuzzy number as JSON
    #[arg(long)]
    x: String,
    #[arg(long, default_value = "paper")]
    mode: String,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct MembershipArgs {
    /// Fuzzy number as JSON
    #[arg(long)]
    number: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    points: usize,
    #[arg(long)]
    levels: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// all | algebra | order | composition | uniqueness
    #[arg(long, default_value = "all")]
    suite: String,
    /// Override: first expression (outer function for composition)
    #[arg(long)]
    f: Option<String>,
    /// Override: second expression (inner function for composition)
    #[arg(long)]
    g: Option<String>,
    /// Override: squeezed expression
    #[arg(long)]
    h: Option<String>,
    /// Override: target fuzzy number JSON
    #[arg(long)]
    at: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also run the seeded random polynomial campaign with this many cases
    #[arg(long, default_value_t = 0)]
    campaign: usize,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

/// The stable JSON record emitted by `limit` and `eval`.
#[derive(Serialize)]
struct OutputRecord {
    schema_version: u32,
    query: String,
    mode: String,
    result: ResultRepr,
    alpha_table: Vec<(f64, f64, f64)>,
    certificate: Option<Certificate>,
    timing_ms: f64,
}

#[derive(Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
enum ResultRepr {
    Converged { value: FuzzyNumberRepr },
    DivergesPlus,
    DivergesMinus,
    NoLimit { reason: NoLimitReason, notes: Vec<String> },
    Undetermined { notes: Vec<String> },
    Evaluated,
}

struct UsageError(String);

impl std::fmt::Debug for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl<T: std::fmt::Display> From<T> for UsageError {
    fn from(e: T) -> Self {
        UsageError(e.to_string())
    }
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return 0;
            }
            eprint!("{err}");
            return 1;
        }
    };
    match cli.command {
        Command::Limit(args) => cmd_limit(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Membership(args) => cmd_membership(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn read_expr(text: &str) -> Result<String, UsageError> {
    if text == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf.trim().to_string())
    } else {
        Ok(text.to_string())
    }
}

fn resolve_levels(flag: Option<usize>) -> Result<AlphaGrid, UsageError> {
    let levels = match flag {
        Some(n) => n,
        None => match std::env::var("FUZZY_LIMIT_LEVELS") {
            Ok(v) => v
                .parse::<usize>()
                .map_err(|_| UsageError(format!("FUZZY_LIMIT_LEVELS is not a number: {v}")))?,
            Err(_) => 101,
        },
    };
    Ok(AlphaGrid::new(levels)?)
}

fn parse_mode(text: &str) -> Result<EvalMode, UsageError> {
    match text {
        "paper" => Ok(EvalMode::PaperVertex),
        "natural" => Ok(EvalMode::NaturalInterval),
        "rigorous" => Ok(EvalMode::RigorousSubdivide(3)),
        other => {
            if let Some(depth) = other.strip_prefix("rigorous:") {
                let d: u32 = depth
                    .parse()
                    .map_err(|_| UsageError(format!("bad subdivision depth '{depth}'")))?;
                if d == 0 {
                    return Err(UsageError("subdivision depth must be at least 1".into()));
                }
                Ok(EvalMode::RigorousSubdivide(d))
            } else {
                Err(UsageError(format!(
                    "unknown mode '{other}' (expected paper, natural, or rigorous[:depth])"
                )))
            }
        }
    }
}

fn parse_number(json: &str, grid: &AlphaGrid) -> Result<FuzzyNumber, UsageError> {
    let repr: FuzzyNumberRepr = serde_json::from_str(json)?;
    Ok(repr.into_number(grid)?)
}

fn parse_side(text: &str) -> Result<Side, UsageError> {
    match text {
        "both" => Ok(Side::Both),
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(UsageError(format!("unknown side '{other}'"))),
    }
}

fn parse_target(text: &str, grid: &AlphaGrid) -> Result<Target, UsageError> {
    match text {
        "inf" | "+inf" => Ok(Target::PlusInfinity),
        "-inf" => Ok(Target::MinusInfinity),
        json => Ok(Target::FuzzyPoint(parse_number(json, grid)?)),
    }
}

/// Formats a value with 12 significant digits and a '.' decimal separator.
fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

fn alpha_table(n: &FuzzyNumber) -> Vec<(f64, f64, f64)> {
    n.decompose()
        .iter()
        .map(|&(alpha, iv)| (alpha, iv.lo, iv.hi))
        .collect()
}

fn print_record(record: &OutputRecord, format: &str) -> Result<(), UsageError> {
    match format {
        "json" => {
            println!("{}", serde_json::to_string(record)?);
            Ok(())
        }
        "csv" => {
            println!("alpha,lo,hi");
            for &(a, lo, hi) in &record.alpha_table {
                println!("{},{},{}", fmt_sig(a), fmt_sig(lo), fmt_sig(hi));
            }
            Ok(())
        }
        other => Err(UsageError(format!("unknown format '{other}'"))),
    }
}

fn cmd_limit(args: LimitArgs) -> i32 {
    match cmd_limit_inner(args) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn cmd_limit_inner(args: LimitArgs) -> Result<i32, UsageError> {
    let start = Instant::now();
    let grid = resolve_levels(args.levels)?;
    let src = read_expr(&args.expr)?;
    let expr = parse(&src)?;
    let mode = parse_mode(&args.mode)?;
    let side = parse_side(&args.side)?;
    let target = parse_target(&args.at, &grid)?;
    let approach = ApproachSpec::new(target, side)?;
    let mut cfg = LimitConfig {
        grid,
        ..LimitConfig::default()
    };
    if let Some(t) = args.tol {
        if !(t > 0.0) {
            return Err(UsageError(format!("tolerance must be positive, got {t}")));
        }
        cfg.tol = t;
    }
    for warning in cfg.validate()? {
        eprintln!("warning: {warning}");
    }

    let result = fuzzy_limit(&expr, &approach, mode, &cfg)?;

    let certificate = match &args.certify {
        Some(list) => {
            let eps: Vec<f64> = list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| UsageError(format!("bad epsilon list '{list}'")))?;
            match certify(&expr, &approach, &result, &eps, mode, &cfg) {
                Ok(cert) => Some(cert),
                Err(err) => {
                    eprintln!("warning: certification skipped: {err}");
                    None
                }
            }
        }
        None => None,
    };

    let (code, repr, table) = match &result.outcome {
        Outcome::Converged(n) => (
            0,
            ResultRepr::Converged {
                value: FuzzyNumberRepr::from(n),
            },
            alpha_table(n),
        ),
        Outcome::DivergesPlus => (2, ResultRepr::DivergesPlus, Vec::new()),
        Outcome::DivergesMinus => (2, ResultRepr::DivergesMinus, Vec::new()),
        Outcome::NoLimit(reason) => (
            3,
            ResultRepr::NoLimit {
                reason: *reason,
                notes: result.notes.clone(),
            },
            Vec::new(),
        ),
        Outcome::Undetermined => (
            4,
            ResultRepr::Undetermined {
                notes: result.notes.clone(),
            },
            Vec::new(),
        ),
    };
    let record = OutputRecord {
        schema_version: SCHEMA_VERSION,
        query: src,
        mode: mode.label(),
        result: repr,
        alpha_table: table,
        certificate,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    print_record(&record, &args.format)?;
    Ok(code)
}

fn cmd_eval(args: EvalArgs) -> i32 {
    let start = Instant::now();
    let inner = || -> Result<(i32, Option<OutputRecord>), UsageError> {
        let grid = resolve_levels(args.levels)?;
        let src = read_expr(&args.expr)?;
        let expr = parse(&src)?;
        let mode = parse_mode(&args.mode)?;
        let x = parse_number(&args.x, &grid)?;
        match eval_fuzzy(&expr, &x, mode) {
            Ok(value) => {
                let record = OutputRecord {
                    schema_version: SCHEMA_VERSION,
                    query: src,
                    mode: mode.label(),
                    result: ResultRepr::Evaluated,
                    alpha_table: alpha_table(&value),
                    certificate: None,
                    timing_ms: start.elapsed().as_secs_f64() * 1e3,
                };
                print_record(&record, &args.format)?;
                Ok((0, None))
            }
            Err(err) => {
                eprintln!("error: {err}");
                Ok((5, None))
            }
        }
    };
    match inner() {
        Ok((code, _)) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn cmd_membership(args: MembershipArgs) -> i32 {
    let inner = || -> Result<i32, UsageError> {
        if args.from >= args.to {
            return Err(UsageError(format!(
                "empty sample range [{}, {}]",
                args.from, args.to
            )));
        }
        if args.points < 1 {
            return Err(UsageError("need at least one sample interval".into()));
        }
        let grid = resolve_levels(args.levels)?;
        let n = parse_number(&args.number, &grid)?;
        println!("x,grade");
        for s in n.sample_membership(args.from, args.to, args.points) {
            println!("{},{}", fmt_sig(s.x), fmt_sig(s.grade));
        }
        Ok(0)
    };
    match inner() {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let inner = || -> Result<i32, UsageError> {
        let selection: SuiteSelection = args.suite.parse().map_err(UsageError)?;
        let grid = resolve_levels(args.levels)?;
        let mut cfg = LimitConfig {
            grid,
            ..LimitConfig::default()
        };
        if let Some(t) = args.tol {
            cfg.tol = t;
        }

        let mut reports: Vec<TheoremReport> = Vec::new();
        let overridden = args.f.is_some();
        if overridden {
            reports.extend(run_overrides(&args, &cfg)?);
        } else {
            reports.extend(run_fixture_suite(selection, &cfg));
        }
        if args.campaign > 0 {
            let mut campaign_cfg = cfg.clone();
            campaign_cfg.grid = AlphaGrid::new(6)?;
            campaign_cfg.tol = campaign_cfg.tol.max(1e-5);
            let summary = run_random_campaign(args.seed, args.campaign, &campaign_cfg);
            reports.extend(summary.reports);
        }

        let mut failed = false;
        for report in &reports {
            println!("{}", serde_json::to_string(report)?);
            failed |= report.status == Status::Fails;
        }
        Ok(if failed { 6 } else { 0 })
    };
    match inner() {
        Ok(code) => {
            // the verify contract folds any failure into a nonzero exit
            if code == 6 {
                1
            } else {
                code
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn run_overrides(args: &VerifyArgs, cfg: &LimitConfig) -> Result<Vec<TheoremReport>, UsageError> {
    let selection: SuiteSelection = args.suite.parse().map_err(UsageError)?;
    let f_src = args.f.as_deref().ok_or(UsageError("--f is required with overrides".into()))?;
    let f = parse(f_src)?;
    let at = match &args.at {
        Some(json) => parse_number(json, &cfg.grid)?,
        None => FuzzyNumber::singleton(0.0, &cfg.grid)?,
    };
    let mode = EvalMode::PaperVertex;
    let mut out = Vec::new();
    match selection {
        SuiteSelection::Algebra | SuiteSelection::All => {
            let g_src = args
                .g
                .as_deref()
                .ok_or(UsageError("--g is required for the algebra suite".into()))?;
            let g = parse(g_src)?;
            let a = FuzzyNumber::triangular(1.0, 2.0, 3.0, &cfg.grid)?;
            out.extend(check_limit_algebra(&f, &g, &a, &at, mode, cfg));
        }
        SuiteSelection::Order => {
            let g_src = args
                .g
                .as_deref()
                .ok_or(UsageError("--g is required for the order suite".into()))?;
            let g = parse(g_src)?;
            let h = match &args.h {
                Some(src) => Some(parse(src)?),
                None => None,
            };
            out.extend(check_order_theorems(&f, &g, h.as_ref(), &at, mode, cfg));
        }
        SuiteSelection::Composition => {
            let g_src = args
                .g
                .as_deref()
                .ok_or(UsageError("--g is required for the composition suite".into()))?;
            let g = parse(g_src)?;
            let approach = ApproachSpec::point(at, Side::Both);
            out.push(check_composition(&f, &g, &approach, mode, cfg));
        }
        SuiteSelection::Uniqueness => {
            let approach = ApproachSpec::point(at, Side::Both);
            out.extend(check_uniqueness_and_sides(&f, &approach, mode, cfg));
        }
    }
    Ok(out)
}
