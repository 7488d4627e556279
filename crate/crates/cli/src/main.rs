use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convkit::blockcode::{DistanceBound, LinearCode};
use convkit::combinators::{self, Transformed};
use convkit::convolutional::{
    free_distance, free_distance_truncated, generalized_singleton, is_basic, is_reduced, unit_memory_from_block,
};
use convkit::families::{self, FamilySpec};
use convkit::galois::{Field, SubfieldEmbedding};
use convkit::io::{self as cio, CodeJson, ConvJson};
use convkit::{selftest, Error, Guards};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "convkit", version, about = "Convolutional codes from linear block codes")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Config {
    /// Output format
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Seed for generated test instances
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    /// Print progress to standard error
    #[arg(short, long, global = true)]
    verbose: bool,
    #[arg(long, env = "CONVKIT_MAX_CODEWORDS", global = true)]
    max_codewords: Option<u64>,
    #[arg(long, env = "CONVKIT_MAX_STATES", global = true)]
    max_states: Option<u64>,
    #[arg(long, env = "CONVKIT_MAX_COSETS", global = true)]
    max_cosets: Option<u64>,
    #[arg(long, env = "CONVKIT_MAX_TRUNCATION", global = true)]
    max_truncation: Option<u64>,
    #[arg(long, env = "CONVKIT_MAX_MINORS", global = true)]
    max_minors: Option<u64>,
}

impl Config {
    fn guards(&self) -> Result<Guards, Error> {
        let d = Guards::default();
        let pick = |v: Option<u64>, default: u64, name: &str| match v {
            Some(0) => Err(Error::InvalidArgument(format!("guard {name} must be positive"))),
            Some(v) => Ok(v),
            None => Ok(default),
        };
        Ok(Guards {
            max_codewords: pick(self.max_codewords, d.max_codewords, "max-codewords")?,
            max_states: pick(self.max_states, d.max_states, "max-states")?,
            max_cosets: pick(self.max_cosets, d.max_cosets, "max-cosets")?,
            max_truncation: pick(self.max_truncation, d.max_truncation, "max-truncation")?,
            max_minors: pick(self.max_minors, d.max_minors, "max-minors")?,
        })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Block-code operations
    #[command(subcommand)]
    Code(CodeCmd),
    /// Convolutional-code operations
    #[command(subcommand)]
    Conv(ConvCmd),
    /// Family reports
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Run the built-in invariant suites
    Selftest,
}

#[derive(Debug, Subcommand)]
enum CodeCmd {
    /// Parameters and structural certificates
    Info {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// The dual code
    Dual {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact minimum distance
    Mindist {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Verify the claims recorded in a code file
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Apply a combinator
    Transform(TransformArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpName {
    Expand,
    Extend,
    Puncture,
    Sum,
    Uv,
    Product,
    Dual,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    op: OpName,
    /// Coordinate to puncture, 1-based (default: last)
    #[arg(long)]
    coord: Option<usize>,
    /// Degree of the subfield over the prime field, for expand (default 1)
    #[arg(long, default_value_t = 1)]
    subfield_e: u32,
    /// Expansion basis as comma-separated big-field elements
    #[arg(long, value_delimiter = ',')]
    basis: Option<Vec<u32>>,
    #[arg(long = "in")]
    input: PathBuf,
    /// Second operand (defaults to the first)
    #[arg(long = "in2")]
    input2: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ConvCmd {
    /// Unit-memory code from a block code
    Build {
        #[arg(long)]
        gamma0: usize,
        #[arg(long = "in")]
        input: PathBuf,
        /// Generator-row permutation, comma-separated (default: canonical order)
        #[arg(long, value_delimiter = ',')]
        row_order: Option<Vec<usize>>,
        /// Also compute the exact free distance
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-certify a convolutional code file and its recorded bounds
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Free distance (exact for memory 1, or truncated to L input blocks)
    Freedist {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        truncated: Option<usize>,
    },
    /// Generalized Singleton bound
    Bound {
        #[arg(long = "in", conflicts_with_all = ["n", "k", "gamma"])]
        input: Option<PathBuf>,
        #[arg(long, requires_all = ["k", "gamma"])]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        gamma: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum FamilyCmd {
    /// Per-index parameter report
    Report {
        #[arg(long)]
        spec: PathBuf,
        /// Output file; `.csv` or `.json` selects the format
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-prefix rate and distance-ratio diagnostic
    Trend {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        rate_floor: String,
        #[arg(long)]
        ratio_floor: String,
    },
}

/// A command's result: the value to print and whether it signals a failed check.
struct Outcome {
    value: Value,
    text: Option<String>,
    failed_check: Option<String>,
}

impl Outcome {
    fn value(value: Value) -> Outcome {
        Outcome { value, text: None, failed_check: None }
    }
}

fn code_summary(code: &LinearCode) -> Value {
    let d = code.distance();
    let mut m = Map::new();
    m.insert("name".into(), json!(code.name()));
    m.insert("field".into(), json!(code.field().spec()));
    m.insert("n".into(), json!(code.len()));
    m.insert("k".into(), json!(code.dim()));
    m.insert("d_lo".into(), json!(d.lo));
    m.insert("d_hi".into(), json!(d.hi));
    if let Some(v) = d.value() {
        m.insert("d".into(), json!(v));
    }
    Value::Object(m)
}

fn settle(code: LinearCode, guards: &Guards) -> Result<LinearCode, Error> {
    match code.min_distance(guards) {
        Ok(d) => code.with_distance_bound(DistanceBound::exact(d)),
        Err(Error::GuardExceeded { .. }) => Ok(code),
        Err(e) => Err(e),
    }
}

fn emit_code(code: &LinearCode, extra: Option<&Transformed>, out: Option<&Path>) -> Result<Value, Error> {
    let mut j = CodeJson::from_code(code);
    j.meta.transform = extra.map(|t| t.record.clone());
    match out {
        Some(path) => {
            cio::write_json(path, &j)?;
            let mut v = code_summary(code);
            if let Some(t) = extra {
                v["transform"] = json!(t.record);
            }
            Ok(v)
        }
        None => Ok(json!(j)),
    }
}

fn run_code(cmd: &CodeCmd, guards: &Guards) -> Result<Outcome, Error> {
    match cmd {
        CodeCmd::Info { input } => {
            let code = settle(cio::read_code(input)?, guards)?;
            let mut v = code_summary(&code);
            v["transitivity"] = json!(code.transitivity());
            v["self_orthogonal"] = json!(code.is_self_orthogonal());
            v["self_dual"] = json!(code.is_self_dual());
            Ok(Outcome::value(v))
        }
        CodeCmd::Dual { input, out } => {
            let code = settle(cio::read_code(input)?, guards)?;
            let t = combinators::dual(&code)?;
            let dual = settle(t.code.clone(), guards)?;
            Ok(Outcome::value(emit_code(&dual, Some(&t), out.as_deref())?))
        }
        CodeCmd::Mindist { input } => {
            let code = cio::read_code(input)?;
            Ok(Outcome::value(json!({ "d": code.min_distance(guards)? })))
        }
        CodeCmd::Check { input } => {
            let j: CodeJson = cio::read_json(input)?;
            let code = j.to_code()?;
            let d = code.min_distance(guards)?;
            let (n, k) = (code.len(), code.dim());
            let parity_ok = code.generator().mul(&code.parity_check().transpose())?.is_zero()
                && code.parity_check().rank() == n - k;
            let claimed_ok = j.meta.claimed_d.is_none_or(|c| c == d);
            let interval_ok = j.meta.distance.is_none_or(|b| b.contains(d));
            let transform_ok = j.meta.transform.as_ref().is_none_or(|t| {
                (t.n, t.k) == (n, k) && t.d_lo <= d && d <= t.d_hi
            });
            let ok = parity_ok && claimed_ok && interval_ok && transform_ok && d <= n - k + 1;
            let value = json!({
                "n": n,
                "k": k,
                "d": d,
                "claimed_d": j.meta.claimed_d,
                "claimed_d_holds": claimed_ok,
                "interval_holds": interval_ok,
                "transform_holds": transform_ok,
                "parity_check_holds": parity_ok,
                "transitivity": code.transitivity(),
                "self_orthogonal": code.is_self_orthogonal(),
                "self_dual": code.is_self_dual(),
                "ok": ok,
            });
            let failed_check = (!ok).then(|| "recorded claims do not hold".to_string());
            Ok(Outcome { value, text: None, failed_check })
        }
        CodeCmd::Transform(args) => {
            let a = settle(cio::read_code(&args.input)?, guards)?;
            let b = match args.input2.as_deref() {
                Some(p) => Some(settle(cio::read_code(p)?, guards)?),
                None => None,
            };
            let b = b.as_ref().unwrap_or(&a);
            let t = match args.op {
                OpName::Expand => {
                    let small = Field::new(a.field().characteristic(), args.subfield_e, None)?;
                    let emb = SubfieldEmbedding::with_big_field(&small, a.field(), args.basis.clone())?;
                    combinators::expand(&a, &emb)?
                }
                OpName::Extend => combinators::extend(&a)?,
                OpName::Puncture => combinators::puncture(&a, args.coord.unwrap_or(a.len()))?,
                OpName::Sum => combinators::direct_sum(&a, b)?,
                OpName::Uv => combinators::u_u_plus_v(&a, b)?,
                OpName::Product => combinators::product(&a, b)?,
                OpName::Dual => combinators::dual(&a)?,
            };
            let code = settle(t.code.clone(), guards)?;
            Ok(Outcome::value(emit_code(&code, Some(&t), args.out.as_deref())?))
        }
    }
}

fn run_conv(cmd: &ConvCmd, guards: &Guards) -> Result<Outcome, Error> {
    match cmd {
        ConvCmd::Build { gamma0, input, row_order, exact, out } => {
            let code = cio::read_code(input)?;
            let mut conv = unit_memory_from_block(&code, *gamma0, row_order.as_deref(), guards)?;
            if *exact {
                conv = conv.with_free_distance(guards)?;
            }
            let j = ConvJson::from_conv(&conv);
            match out {
                Some(path) => {
                    cio::write_json(path, &j)?;
                    Ok(Outcome::value(json!({ "params": j.params })))
                }
                None => Ok(Outcome::value(json!(j))),
            }
        }
        ConvCmd::Check { input } => {
            let j: ConvJson = cio::read_json(input)?;
            let conv = j.to_conv(guards)?;
            let g = conv.generator();
            let basic = is_basic(g, guards)?;
            let reduced = is_reduced(g)?;
            let p = conv.params();
            let computed = if p.memory <= 1 {
                match free_distance(g, guards) {
                    Ok(fd) => Some(fd.value),
                    Err(Error::GuardExceeded { .. }) => None,
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            let within = computed.is_none_or(|d| p.df_lb.is_none_or(|lb| lb <= d) && d <= p.s);
            let recorded = match (p.df, computed) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            };
            let ok = basic && reduced && within && recorded;
            let value = json!({
                "basic": basic,
                "reduced": reduced,
                "params": p,
                "df_computed": computed,
                "bounds_hold": within,
                "recorded_df_holds": recorded,
                "ok": ok,
            });
            let failed_check = (!ok).then(|| "convolutional code claims do not hold".to_string());
            Ok(Outcome { value, text: None, failed_check })
        }
        ConvCmd::Freedist { input, truncated } => {
            let conv = cio::read_json::<ConvJson>(input)?.to_conv(guards)?;
            let g = conv.generator();
            match truncated {
                Some(l) => {
                    let d = free_distance_truncated(g, *l, guards)?;
                    let exact = g.memory() <= 1 && free_distance(g, guards).is_ok_and(|fd| fd.witness_len <= *l);
                    Ok(Outcome::value(json!({ "df_truncated": d, "horizon": l, "upper_bound_only": !exact })))
                }
                None => {
                    let fd = free_distance(g, guards)?;
                    Ok(Outcome::value(json!({ "df": fd.value, "witness_len": fd.witness_len })))
                }
            }
        }
        ConvCmd::Bound { input, n, k, gamma } => {
            let (n, k, gamma) = match (input, n, k, gamma) {
                (Some(path), ..) => {
                    let j: ConvJson = cio::read_json(path)?;
                    (j.params.n, j.params.k, j.params.gamma)
                }
                (None, Some(n), Some(k), Some(g)) => (*n, *k, *g),
                _ => return Err(Error::InvalidArgument("give --in or all of --n, --k, --gamma".into())),
            };
            let sd = generalized_singleton(n, k, gamma)?;
            Ok(Outcome::value(json!({ "n": n, "k": k, "gamma": gamma, "s": sd.s, "r": sd.r })))
        }
    }
}

fn run_family(cmd: &FamilyCmd, guards: &Guards, format: Format) -> Result<Outcome, Error> {
    match cmd {
        FamilyCmd::Report { spec, out } => {
            let spec: FamilySpec = cio::read_json(spec)?;
            let report = families::family_report(&spec, guards)?;
            let violations = report.violations();
            if !violations.is_empty() {
                return Err(Error::Internal(format!("report invariants failed: {}", violations.join("; "))));
            }
            let csv_out = match out.as_deref().and_then(Path::extension).and_then(|e| e.to_str()) {
                Some("csv") => true,
                Some("json") => false,
                _ => format == Format::Csv,
            };
            let body = if csv_out { report.to_csv()? } else { report.to_json()? + "\n" };
            match out {
                Some(path) => {
                    std::fs::write(path, &body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    Ok(Outcome::value(json!({
                        "rows": report.rows.len(),
                        "skipped": report.skipped.len(),
                        "out": path.display().to_string(),
                    })))
                }
                None => Ok(Outcome { value: json!(report), text: csv_out.then_some(body), failed_check: None }),
            }
        }
        FamilyCmd::Trend { spec, rate_floor, ratio_floor } => {
            let spec: FamilySpec = cio::read_json(spec)?;
            let report = families::family_report(&spec, guards)?;
            let trend = families::goodness_trend(
                &report,
                families::parse_fraction(rate_floor)?,
                families::parse_fraction(ratio_floor)?,
            )?;
            Ok(Outcome::value(json!(trend)))
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn render(value: &Value, format: Format) -> String {
    match (format, value) {
        (Format::Json, v) => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        (Format::Table, Value::Object(m)) => {
            let width = m.keys().map(String::len).max().unwrap_or(0);
            m.iter().map(|(k, v)| format!("{k:<width$}  {}\n", scalar(v))).collect()
        }
        (Format::Csv, Value::Object(m)) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(m.keys()).expect("in-memory write");
            w.write_record(m.values().map(scalar)).expect("in-memory write");
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
        }
        (_, v) => scalar(v) + "\n",
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::GuardExceeded { .. } => "guard_exceeded",
        Error::Internal(_) => "internal",
        Error::Io(_) => "io",
        Error::ZeroCode => "zero_code",
        Error::RankCondition(_) => "rank_condition",
        Error::Unsupported(_) => "unsupported",
        _ => "validation",
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::GuardExceeded { .. } => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn report_error(kind: &str, message: &str) {
    let v = json!({ "error": { "kind": kind, "message": message } });
    let _ = writeln!(std::io::stderr(), "{v}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report_error("usage", e.to_string().trim_end());
            return ExitCode::from(2);
        }
    };
    let format = cli.config.format;
    let result = cli.config.guards().and_then(|guards| {
        if cli.config.verbose {
            eprintln!("guards: {guards:?}");
        }
        match &cli.command {
            Command::Code(c) => run_code(c, &guards),
            Command::Conv(c) => run_conv(c, &guards),
            Command::Family(c) => run_family(c, &guards, format),
            Command::Selftest => {
                let r = selftest::run(cli.config.seed, &guards)?;
                let failed_check = (r.failed > 0).then(|| format!("{} selftest checks failed", r.failed));
                Ok(Outcome { value: json!(r), text: None, failed_check })
            }
        }
    });
    match result {
        Ok(outcome) => {
            let text = outcome.text.unwrap_or_else(|| render(&outcome.value, format));
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            match outcome.failed_check {
                Some(msg) => {
                    report_error("check_failed", &msg);
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            report_error(error_kind(&e), &e.to_string());
            ExitCode::from(exit_code(&e))
        }
    }
}
