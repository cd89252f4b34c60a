//! The `bimean` command line.
//!
//! Results go to `out`, diagnostics to `err`. The exit code is returned.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bimean::convexity::{criterion_check, definitional_check, letter_exponent, Outcome, PQPair, Verdict, EQUALITY_TOL};
use bimean::expr::FunctionSpec;
use bimean::inequalities::{
    alzer_monotone, alzer_sandwich, audit_all, builtin_catalog, chebyshev_check, default_p_grid,
    ebanks_check, identric_sandwich, jensen_check, ll_al_check, mean_chain, AlzerPart, AuditConfig,
    AuditError, CheckReport, IdentricProfile, Tolerances, MEAN_CHAIN_TOL,
};
use bimean::means::{evaluate, MeanKind, PositivePair};
use bimean::report::{format_sig17, to_json, write_csv};
use bimean::sampling::{IntervalSpec, Sampling};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INPUT: i32 = 65;
pub const EXIT_NUMERIC: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "bimean", version, about = "Bivariate means, MN-convexity and mean-inequality audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate means.
    #[command(subcommand)]
    Mean(MeanCommand),
    /// Decide MN-convexity of a function.
    #[command(allow_negative_numbers = true)]
    Convexity(ConvexityArgs),
    /// Audit an inequality suite.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum MeanCommand {
    /// One mean at one pair.
    #[command(allow_negative_numbers = true)]
    Eval {
        #[arg(long)]
        kind: MeanKind,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Several means at several pairs.
    Table {
        /// Comma-separated kinds, e.g. "A,G,L,J:2".
        #[arg(long)]
        kinds: String,
        /// A file with one "x y" pair per line, or inline pairs "x y; x y".
        #[arg(long)]
        pairs: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Definition,
    Criterion,
    Both,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    /// Uniform instead of log-uniform sampling.
    #[arg(long)]
    uniform: bool,
}

#[derive(Args, Debug)]
struct ConvexityArgs {
    #[arg(long = "f")]
    f: String,
    #[arg(long, default_value = "A")]
    m: MeanKind,
    #[arg(long, default_value = "A")]
    n: MeanKind,
    /// Power-mean exponents "p,q"; overrides --m and --n.
    #[arg(long)]
    pq: Option<String>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = EQUALITY_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    method: Method,
    #[command(flatten)]
    plan: PlanArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Ebanks,
    Identric,
    Alzer,
    Chebyshev,
    Jensen,
    Chain,
    AlzerMono,
    LlAl,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Profile {
    Lower,
    Upper,
    One,
    Two,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long = "f")]
    f: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum)]
    profile: Option<Profile>,
    /// Number of random pairs; structured pairs are added.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Normalized equality tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Audit the single pair (x, y) instead of sampling.
    #[arg(long, requires = "y")]
    x: Option<f64>,
    #[arg(long, requires = "x")]
    y: Option<f64>,
    /// Second function for the Chebyshev suite.
    #[arg(long)]
    g: Option<String>,
    /// Weight for the Chebyshev suite.
    #[arg(long, default_value = "1")]
    w: String,
    /// Inner function for the Jensen suite.
    #[arg(long, default_value = "x")]
    phi: String,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[command(flatten)]
    plan: PlanArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Numeric(String),
    Precondition(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Precondition(_) => EXIT_PRECONDITION,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) | CliError::Precondition(m) => m,
        }
    }
}

impl From<AuditError> for CliError {
    fn from(e: AuditError) -> Self {
        match e {
            AuditError::Eval(_) | AuditError::NotPositive { .. } | AuditError::InvalidInput(_) => {
                CliError::Input(e.to_string())
            }
            AuditError::PreconditionUnmet { .. } => CliError::Precondition(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::Numeric(format!("write failed: {e}"))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Mean(cmd) => run_mean(cmd, out),
        Command::Convexity(args) => run_convexity(args, out),
        Command::Verify(args) => run_verify(args, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "bimean: error: {}", e.message());
            e.code()
        }
    }
}

fn parse_function(text: &str) -> Result<FunctionSpec, CliError> {
    FunctionSpec::parse(text).map_err(|e| CliError::Input(format!("cannot parse {text:?}: {e}")))
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = to_json(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    writeln!(out, "{text}").map_err(io_error)
}

fn run_mean(cmd: MeanCommand, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        MeanCommand::Eval { kind, x, y, format } => {
            let pair = PositivePair::new(x, y).map_err(|e| CliError::Input(e.to_string()))?;
            let v = evaluate(kind, pair).map_err(|e| CliError::Input(e.to_string()))?;
            match format {
                Format::Json => json_line(
                    out,
                    &serde_json::json!({ "kind": kind.to_string(), "x": x, "y": y, "value": v }),
                )?,
                Format::Csv => {
                    write!(out, "kind,x,y,value\n{kind},{},{},{}\n", format_sig17(x), format_sig17(y), format_sig17(v))
                        .map_err(io_error)?
                }
                Format::Plain => writeln!(out, "{}", format_sig17(v)).map_err(io_error)?,
            }
            Ok(EXIT_OK)
        }
        MeanCommand::Table { kinds, pairs, format } => {
            let kinds = kinds
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.parse::<MeanKind>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Input(e.to_string()))?;
            if kinds.is_empty() {
                return Err(CliError::Input("--kinds is empty".into()));
            }
            let pairs = read_pairs(&pairs)?;
            let mut rows = Vec::with_capacity(pairs.len());
            for pair in &pairs {
                let values = kinds
                    .iter()
                    .map(|k| evaluate(*k, *pair))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                rows.push((pair, values));
            }
            let names: Vec<String> = kinds.iter().map(|k| k.to_string()).collect();
            match format {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let header = ["x".to_string(), "y".to_string()].into_iter().chain(names.iter().cloned());
                    w.write_record(header).map_err(|e| CliError::Numeric(e.to_string()))?;
                    for (pair, values) in &rows {
                        let cells = [pair.x(), pair.y()].into_iter().chain(values.iter().copied()).map(format_sig17);
                        w.write_record(cells).map_err(|e| CliError::Numeric(e.to_string()))?;
                    }
                    let bytes = w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
                    out.write_all(&bytes).map_err(io_error)?;
                }
                Format::Json => {
                    let table: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(pair, values)| {
                            let mut m = serde_json::Map::new();
                            m.insert("x".into(), pair.x().into());
                            m.insert("y".into(), pair.y().into());
                            for (name, v) in names.iter().zip(values) {
                                m.insert(name.clone(), (*v).into());
                            }
                            serde_json::Value::Object(m)
                        })
                        .collect();
                    json_line(out, &table)?;
                }
                Format::Plain => {
                    writeln!(out, "x y {}", names.join(" ")).map_err(io_error)?;
                    for (pair, values) in &rows {
                        let cells: Vec<String> = [pair.x(), pair.y()]
                            .into_iter()
                            .chain(values.iter().copied())
                            .map(format_sig17)
                            .collect();
                        writeln!(out, "{}", cells.join(" ")).map_err(io_error)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

/// Pairs from a file, or from inline text when no such file exists. Lines
/// (or `;`-separated entries) hold "x y"; `#` starts a comment.
fn read_pairs(source: &str) -> Result<Vec<PositivePair>, CliError> {
    let text = if Path::new(source).is_file() {
        std::fs::read_to_string(source).map_err(|e| CliError::Input(format!("{source}: {e}")))?
    } else {
        source.replace(';', "\n")
    };
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let bad = || CliError::Input(format!("pair {}: expected \"x y\", found {body:?}", i + 1));
        let [x, y] = fields[..] else { return Err(bad()) };
        let (x, y) = (x.parse::<f64>().map_err(|_| bad())?, y.parse::<f64>().map_err(|_| bad())?);
        pairs.push(PositivePair::new(x, y).map_err(|e| CliError::Input(format!("pair {}: {e}", i + 1)))?);
    }
    if pairs.is_empty() {
        return Err(CliError::Input("no pairs given".into()));
    }
    Ok(pairs)
}

fn plan(args: &PlanArgs, samples: usize, lo: f64, hi: f64) -> Result<IntervalSpec, CliError> {
    let sampling = if args.uniform { Sampling::Uniform } else { Sampling::LogUniform };
    IntervalSpec::with_sampling(args.lo.unwrap_or(lo), args.hi.unwrap_or(hi), samples, sampling, args.seed)
        .map_err(|e| CliError::Input(e.to_string()))
}

#[derive(Serialize)]
struct ConvexityOutput {
    f: String,
    m: String,
    n: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pq: Option<PQPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    definition: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    criterion: Option<Verdict>,
}

fn run_convexity(args: ConvexityArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = parse_function(&args.f)?;
    let (m, n) = match &args.pq {
        Some(text) => {
            let parts: Vec<&str> = text.split(',').collect();
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| CliError::Input(format!("--pq expects \"p,q\", got {text:?}")));
            let [p, q] = parts[..] else {
                return Err(CliError::Input(format!("--pq expects \"p,q\", got {text:?}")));
            };
            (MeanKind::Power(num(p)?), MeanKind::Power(num(q)?))
        }
        None => (args.m, args.n),
    };
    let iv = plan(&args.plan, args.samples, 0.1, 10.0)?;
    let pq = match (letter_exponent(m), letter_exponent(n)) {
        (Ok(p), Ok(q)) => Some(PQPair::new(p, q)),
        _ => None,
    };
    let numeric = |e: bimean::convexity::ConvexityError| match e {
        bimean::convexity::ConvexityError::PairEval { .. } | bimean::convexity::ConvexityError::NotPositive { .. } => {
            CliError::Input(e.to_string())
        }
        _ => CliError::Numeric(e.to_string()),
    };
    let definition = match args.method {
        Method::Criterion => None,
        _ => Some(definitional_check(&f, m, n, &iv, args.tol).map_err(numeric)?),
    };
    let criterion = match (args.method, pq) {
        (Method::Definition, _) => None,
        (Method::Criterion, None) => {
            return Err(CliError::Input(format!("the derivative criterion needs power means, got {m} and {n}")))
        }
        (_, None) => None,
        (_, Some(pq)) => Some(criterion_check(&f, pq, &iv, args.tol).map_err(numeric)?),
    };
    let outcomes: Vec<Outcome> = definition.iter().chain(criterion.iter()).map(|v| v.outcome).collect();
    let code = if outcomes.contains(&Outcome::Inconclusive) || outcomes.windows(2).any(|w| w[0] != w[1]) {
        EXIT_PRECONDITION
    } else {
        EXIT_OK
    };
    let output = ConvexityOutput {
        f: f.to_string(),
        m: m.to_string(),
        n: n.to_string(),
        pq,
        definition,
        criterion,
    };
    match args.format {
        Format::Json => json_line(out, &output)?,
        Format::Plain | Format::Csv => {
            let mut lines = vec![format!("f = {}, M = {}, N = {}", output.f, output.m, output.n)];
            for (label, v) in [("definition", &output.definition), ("criterion", &output.criterion)] {
                if let Some(v) = v {
                    lines.push(format!(
                        "{label}: {:?} (min margin {}, {} samples)",
                        v.outcome,
                        format_sig17(v.min_margin),
                        v.samples_used
                    ));
                    for w in &v.witnesses {
                        let pts: Vec<String> = w.points.iter().map(|p| format_sig17(*p)).collect();
                        lines.push(format!(
                            "  violates {:?} at [{}]: lhs {} rhs {}",
                            w.violates,
                            pts.join(", "),
                            format_sig17(w.lhs),
                            format_sig17(w.rhs)
                        ));
                    }
                }
            }
            writeln!(out, "{}", lines.join("\n")).map_err(io_error)?;
        }
    }
    Ok(code)
}

fn run_verify(args: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let default_eq = if args.suite == Suite::Chain { MEAN_CHAIN_TOL } else { EQUALITY_TOL };
    let base = Tolerances::default();
    let tolerances = Tolerances {
        equality: args.tol.unwrap_or(default_eq),
        quad_rel: args.rel_tol.unwrap_or(base.quad_rel),
        quad_abs: args.abs_tol.unwrap_or(base.quad_abs),
        ..base
    };
    let cfg = AuditConfig {
        tolerances,
        seed: args.plan.seed,
    };
    let pairs = || -> Result<Vec<PositivePair>, CliError> {
        match (args.x, args.y) {
            (Some(x), Some(y)) => Ok(vec![PositivePair::new(x, y).map_err(|e| CliError::Input(e.to_string()))?]),
            _ => Ok(plan(&args.plan, args.trials, 1e-2, 1e2)?.pairs()),
        }
    };
    let function = || -> Result<FunctionSpec, CliError> {
        let text = args.f.as_deref().ok_or_else(|| CliError::Input("this suite needs --f".into()))?;
        parse_function(text)
    };
    let pointwise = |h: FunctionSpec| move |t: f64| h.eval(t).unwrap_or(f64::NAN);
    let profile_error = |p: Profile| CliError::Input(format!("profile {p:?} does not apply to this suite"));

    let mut errors = Vec::new();
    let reports: Vec<CheckReport> = match args.suite {
        Suite::Ebanks => vec![ebanks_check(&function()?, &pairs()?, &cfg)?],
        Suite::Identric => {
            let profile = match args.profile.unwrap_or(Profile::Lower) {
                Profile::Lower => IdentricProfile::Lower,
                Profile::Upper => IdentricProfile::Upper,
                p => return Err(profile_error(p)),
            };
            vec![identric_sandwich(&function()?, &pairs()?, profile, &cfg)?]
        }
        Suite::Alzer => {
            let part = match args.profile.unwrap_or(Profile::One) {
                Profile::One => AlzerPart::One,
                Profile::Two => AlzerPart::Two,
                p => return Err(profile_error(p)),
            };
            vec![alzer_sandwich(&function()?, args.p.unwrap_or(1.0), &pairs()?, part, &cfg)?]
        }
        Suite::Chebyshev => {
            let g = parse_function(args.g.as_deref().unwrap_or("x"))?;
            let w = parse_function(&args.w)?;
            let f = function()?;
            vec![chebyshev_check(&pointwise(f), &pointwise(g), &pointwise(w), args.a, args.b, &cfg)?]
        }
        Suite::Jensen => {
            let phi = parse_function(&args.phi)?;
            vec![jensen_check(&function()?, &pointwise(phi), args.a, args.b, &cfg)?]
        }
        Suite::Chain => vec![mean_chain(&pairs()?, &cfg)?],
        Suite::AlzerMono => vec![alzer_monotone(&pairs()?, &default_p_grid(), &cfg)?],
        Suite::LlAl => vec![ll_al_check(&function()?, &pairs()?, &cfg)?],
        Suite::All => {
            let run = audit_all(&builtin_catalog(), &plan(&args.plan, args.trials, 1e-2, 1e2)?, &tolerances);
            errors = run.errors;
            run.reports
        }
    };

    match args.format {
        Format::Json => {
            for r in &reports {
                json_line(out, r)?;
            }
        }
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&reports, &mut buf).map_err(|e| CliError::Numeric(e.to_string()))?;
            out.write_all(&buf).map_err(io_error)?;
        }
        Format::Plain => {
            for r in &reports {
                write_plain(out, r).map_err(io_error)?;
            }
        }
    }
    for (id, e) in &errors {
        let _ = writeln!(err, "bimean: error in {id}: {e}");
    }
    for r in &reports {
        for q in r.inequalities.iter().filter(|q| q.failures > 0) {
            let _ = writeln!(err, "bimean: {} ({}): {} counterexample(s) to {}", r.name, r.subject, q.failures, q.description);
        }
        for p in r.flagged_preconditions() {
            let _ = writeln!(err, "bimean: {} ({}): precondition {} is {:?}: {}", r.name, r.subject, p.name, p.status, p.observed);
        }
    }

    let failures: usize = reports.iter().map(|r| r.failures()).sum();
    let flagged = reports
        .iter()
        .any(|r| r.flagged_preconditions().next().is_some() || r.inconclusive() > 0);
    Ok(if failures > 0 {
        EXIT_COUNTEREXAMPLE
    } else if !errors.is_empty() {
        EXIT_NUMERIC
    } else if flagged {
        EXIT_PRECONDITION
    } else {
        EXIT_OK
    })
}

fn write_plain(out: &mut dyn Write, r: &CheckReport) -> std::io::Result<()> {
    writeln!(out, "{} ({}), seed {}", r.name, r.subject, r.seed)?;
    for p in &r.preconditions {
        writeln!(out, "  precondition {}: {:?} ({})", p.name, p.status, p.observed)?;
    }
    for q in &r.inequalities {
        let status = if q.failures > 0 { "FAIL" } else if q.inconclusive > 0 { "INCONCLUSIVE" } else { "ok" };
        writeln!(
            out,
            "  {status:<4} {}: {} tested, {} failed, {} inconclusive, min margin {}",
            q.description,
            q.pairs_tested,
            q.failures,
            q.inconclusive,
            format_sig17(q.min_margin)
        )?;
        if let Some(w) = &q.worst_witness {
            writeln!(
                out,
                "       worst at ({}, {}): lhs {} rhs {}",
                format_sig17(w.x),
                format_sig17(w.y),
                format_sig17(w.lhs),
                format_sig17(w.rhs)
            )?;
        }
    }
    if let Some(e) = &r.ebanks {
        writeln!(out, "  P = {}, R = {}, inner mean {}", format_sig17(e.p), format_sig17(e.r), format_sig17(e.inner_mean))?;
    }
    Ok(())
}
