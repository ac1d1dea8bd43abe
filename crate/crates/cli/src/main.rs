//! `qv`: validate torus diagrams, evaluate vertex-formalism series and
//! membrane indices, and run the acceptance checks.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qv_core::diagram::{load, validate_file, DiagramFile, Framing, TorusDiagram};
use qv_core::evaluator::{membrane_indices, qnumber_expand, report_json, EvalError, Evaluator, IndexReport, Mode};
use qv_core::examples::{by_name, ExampleSpec, Oracle, OracleStatus, BUILTIN};
use qv_core::partitions::Partition;
use qv_core::ring::{LocalizedElem, VarNames};
use qv_core::schur::{preload_vertex_cache, vertex_cache_entries};
use qv_core::selftest::{run_all, Tier, Verdict};

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "qv", version, about = "Vertex formalism for Calabi-Yau fivefolds with anti-diagonal torus actions")]
struct Cli {
    /// Worker threads for label summation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a diagram file against the diagram and framing invariants.
    Validate {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the disconnected series and membrane indices of a diagram.
    Evaluate(EvaluateArgs),
    /// Run the acceptance checks.
    Selftest {
        #[arg(value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Treat mismatches against conjectural formulas as failures.
        #[arg(long)]
        strict_oracles: bool,
    },
    /// List the builtin examples.
    List,
    /// Print the diagram file of a builtin example.
    Export { name: String },
}

#[derive(Args)]
struct EvaluateArgs {
    /// Builtin example name (see `qv list`).
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    example: Option<String>,
    /// Diagram file in JSON.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Largest grading degree to evaluate.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    cutoff: u32,
    /// Treatment of degrees on anti-diagonal edges (default: the example's, else strict).
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Comma-separated outputs.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Output::Indices])]
    out: Vec<Output>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cross-check every coefficient at this many random rational points.
    #[arg(long)]
    verify: Option<usize>,
    /// Signs s_i of the substitution Q_i -> s_i Q_i before taking logarithms,
    /// comma-separated; `none` disables (default: the example's convention).
    #[arg(long, allow_hyphen_values = true)]
    q_signs: Option<String>,
    /// First character of the q-number table, as a comma-separated weight.
    #[arg(long, allow_hyphen_values = true)]
    qnumber_x: Option<String>,
    /// Second character of the q-number table.
    #[arg(long, allow_hyphen_values = true)]
    qnumber_y: Option<String>,
    /// Treat mismatches against conjectural oracles as failures.
    #[arg(long)]
    strict_oracles: bool,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    AssumeVanishing,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum Output {
    Series,
    Connected,
    Indices,
    QnumberTable,
}

impl Output {
    fn key(self) -> &'static str {
        match self {
            Output::Series => "series",
            Output::Connected => "connected",
            Output::Indices => "indices",
            Output::QnumberTable => "qnumber-table",
        }
    }
}

/// A failure together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    fn check(message: impl Into<String>) -> Self {
        Failure { code: EXIT_FAILURE, message: message.into() }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::check(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the worker pool: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    let cache = std::env::var_os("QV_CACHE_DIR").map(|d| PathBuf::from(d).join("vertex-cache.json"));
    if let Some(path) = &cache {
        load_cache(path);
    }
    let result = match cli.command {
        Command::Validate { path, format } => validate(&path, format),
        Command::Evaluate(args) => evaluate(&args),
        Command::Selftest { level, strict_oracles } => selftest(level, strict_oracles),
        Command::List => {
            for name in BUILTIN {
                println!("{name}");
            }
            Ok(())
        }
        Command::Export { name } => match by_name(&name) {
            Some(spec) => {
                println!("{}", spec.file.to_json_string());
                Ok(())
            }
            None => Err(Failure::input(format!("unknown example {name}"))),
        },
    };
    if let Some(path) = &cache {
        if let Err(e) = save_cache(path) {
            eprintln!("warning: cache not written to {}: {e}", path.display());
        }
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_diagram(path: &Path) -> Result<DiagramFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    DiagramFile::from_json_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn validate(path: &Path, format: Format) -> Result<(), Failure> {
    let file = read_diagram(path)?;
    let violations = validate_file(&file);
    match format {
        Format::Json => println!("{}", json!({ "valid": violations.is_empty(), "violations": violations })),
        Format::Text if violations.is_empty() => println!("{}: valid", path.display()),
        Format::Text => {
            for v in &violations {
                println!("{v}");
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::check(format!("{} violation(s)", violations.len())))
    }
}

fn parse_ints(s: &str, what: &str) -> Result<Vec<i64>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Failure::input(format!("{what}: not an integer list: {s}"))))
        .collect()
}

/// The diagram under evaluation, owned either by a builtin spec or by a parsed file.
enum Source {
    Builtin(Box<ExampleSpec>),
    File { diagram: TorusDiagram, framing: Framing },
}

impl Source {
    fn parts(&self) -> (&TorusDiagram, &Framing) {
        match self {
            Source::Builtin(s) => (&s.diagram, &s.framing),
            Source::File { diagram, framing } => (diagram, framing),
        }
    }

    fn spec(&self) -> Option<&ExampleSpec> {
        match self {
            Source::Builtin(s) => Some(s),
            Source::File { .. } => None,
        }
    }
}

fn evaluate(args: &EvaluateArgs) -> Result<(), Failure> {
    let source = match (&args.example, &args.input) {
        (Some(name), _) => {
            Source::Builtin(Box::new(by_name(name).ok_or_else(|| Failure::input(format!("unknown example {name}")))?))
        }
        (None, Some(path)) => {
            let file = read_diagram(path)?;
            let (diagram, framing) = load(&file).map_err(|e| Failure::check(e.to_string()))?;
            Source::File { diagram, framing }
        }
        (None, None) => return Err(Failure::input("one of --example or --input is required")),
    };
    let spec = source.spec();
    let mode = match args.mode {
        Some(ModeArg::Strict) => Mode::Strict,
        Some(ModeArg::AssumeVanishing) => Mode::AssumeVanishing,
        None => spec.map(|s| s.mode).unwrap_or(Mode::Strict),
    };
    let q_signs = match args.q_signs.as_deref() {
        Some("none") => None,
        Some(s) => Some(parse_ints(s, "--q-signs")?),
        None => spec.and_then(|s| s.q_signs.clone()),
    };
    let default_chars = spec.and_then(|s| match &s.oracle {
        Oracle::QNumberTables { x, y, .. } => Some((x.clone(), y.clone())),
        _ => None,
    });
    let chars = match (&args.qnumber_x, &args.qnumber_y) {
        (Some(x), Some(y)) => Some((parse_ints(x, "--qnumber-x")?, parse_ints(y, "--qnumber-y")?)),
        (None, None) => default_chars,
        _ => return Err(Failure::input("--qnumber-x and --qnumber-y go together")),
    };
    let (diagram, framing) = source.parts();
    let outputs: Vec<&str> = args.out.iter().map(|o| o.key()).collect();
    if args.out.contains(&Output::QnumberTable) {
        match &chars {
            None => return Err(Failure::input("qnumber-table needs --qnumber-x and --qnumber-y")),
            Some((x, y)) if x.len() != diagram.m || y.len() != diagram.m => {
                return Err(Failure::input(format!("q-number characters need {} entries", diagram.m)))
            }
            _ => {}
        }
    }
    if let Some(s) = &q_signs {
        if s.len() != diagram.grading.rank() || s.iter().any(|&x| x != 1 && x != -1) {
            return Err(Failure::input(format!("--q-signs needs {} entries of +-1", diagram.grading.rank())));
        }
    }

    let ev = Evaluator::new(diagram, framing, mode)?;
    let report = membrane_indices(&ev, args.cutoff, q_signs.as_deref())?;
    let verify = match args.verify {
        Some(n) => Some(ev.verify_at_points(&report.disconnected, n, 0)?),
        None => None,
    };
    let oracle = spec.and_then(|s| oracle_check(s, &report, args.cutoff));
    let chars_ref = chars.as_ref().map(|(x, y)| (x.as_slice(), y.as_slice()));

    match args.format {
        Format::Json => {
            let mut v = report_json(&ev, &report, args.cutoff, &outputs, chars_ref);
            if let Some(bad) = &verify {
                v["verify"] = json!({ "points": args.verify, "mismatched_degrees": bad });
            }
            if let Some(o) = &oracle {
                v["oracle"] = json!({ "status": o.status, "mismatches": o.mismatches });
            }
            let text = serde_json::to_string_pretty(&v).expect("report serializes");
            // A closed pipe downstream is not an evaluation failure.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }
        Format::Text => print_text(&ev, &report, args, &outputs, chars_ref, verify.as_deref(), oracle.as_ref()),
    }

    if let Some(bad) = &verify {
        if !bad.is_empty() {
            return Err(Failure::check(format!("point verification failed at degrees {bad:?}")));
        }
    }
    if let Some(o) = &oracle {
        let fatal = o.status == OracleStatus::Proven || args.strict_oracles;
        if !o.mismatches.is_empty() && fatal {
            return Err(Failure::check(format!("oracle mismatch at degrees {:?}", o.mismatches)));
        }
    }
    Ok(())
}

struct OracleCheck {
    status: OracleStatus,
    mismatches: Vec<Vec<u32>>,
}

/// Compares the report with the example's oracle on the degrees it covers.
fn oracle_check(spec: &ExampleSpec, report: &IndexReport, cutoff: u32) -> Option<OracleCheck> {
    let mut mismatches = Vec::new();
    match &spec.oracle {
        Oracle::Disconnected(f) => {
            let want = f(cutoff);
            for (d, c) in report.disconnected.iter() {
                if want.get(d) != *c {
                    mismatches.push(d.clone());
                }
            }
        }
        Oracle::AdamsIndices { k, expected } => {
            for (&d, want) in expected.range(1..=cutoff) {
                if report.omega.get(&[d]).adams(*k) != *want {
                    mismatches.push(vec![d]);
                }
            }
        }
        Oracle::QNumberTables { x, y, tables } => {
            if report.q_signs != spec.q_signs {
                return None;
            }
            for (&d, want) in tables.range(1..=cutoff) {
                if qnumber_expand(&report.omega.get(&[d]), x, y).ok().as_ref() != Some(want) {
                    mismatches.push(vec![d]);
                }
            }
        }
    }
    Some(OracleCheck { status: spec.oracle_status, mismatches })
}

fn print_text(
    ev: &Evaluator<'_>,
    report: &IndexReport,
    args: &EvaluateArgs,
    outputs: &[&str],
    chars: Option<(&[i64], &[i64])>,
    verify: Option<&[Vec<u32>]>,
    oracle: Option<&OracleCheck>,
) {
    let d = ev.diagram;
    let names = VarNames::default_for(d.m);
    println!("# diagram: {}", d.name.as_deref().unwrap_or("(unnamed)"));
    println!("# torus rank: {}, mode: {}, cutoff: {}", d.m, ev.mode.as_str(), args.cutoff);
    println!("# framing hash: {}", ev.framing.hash_hex(d));
    if let Some(s) = &report.q_signs {
        println!("# indices of G(s Q) with s = {s:?}");
    }
    for beta in d.grading.degrees_up_to(args.cutoff) {
        if beta.iter().all(|&x| x == 0) {
            continue;
        }
        println!("Q^{beta:?}:");
        let line = |label: &str, x: &LocalizedElem| println!("  {label} = {}", x.pretty(&names));
        if outputs.contains(&"series") {
            line("disconnected", &report.disconnected.get(&beta));
        }
        if outputs.contains(&"connected") {
            line("connected", &report.connected.get(&beta));
        }
        if outputs.contains(&"indices") {
            let omega = report.omega.get(&beta);
            line("Omega", &omega);
            let integ = omega.integrality_report();
            println!("  integral: {}", integ.in_r_integer);
        }
        if let (true, Some((x, y))) = (outputs.contains(&"qnumber-table"), chars) {
            match qnumber_expand(&report.omega.get(&beta), x, y) {
                Ok(t) if t.is_empty() => println!("  N: all zero"),
                Ok(t) => print_table(&t),
                Err(e) => println!("  N: {e}"),
            }
        }
    }
    if let Some(bad) = verify {
        if bad.is_empty() {
            println!("# verify: all coefficients agree at {} random points", args.verify.unwrap_or(0));
        } else {
            println!("# verify: mismatch at {bad:?}");
        }
    }
    if let Some(o) = oracle {
        let status = match o.status {
            OracleStatus::Proven => "proven",
            OracleStatus::Conjectural => "conjectural",
        };
        if o.mismatches.is_empty() {
            println!("# oracle ({status}): match");
        } else {
            println!("# oracle ({status}): mismatch at {:?}", o.mismatches);
        }
    }
}

/// Rows `k1`, columns `k2`, blank cells zero.
fn print_table(t: &BTreeMap<(u32, u32), i64>) {
    let k1max = t.keys().map(|k| k.0).max().unwrap_or(1);
    let k2max = t.keys().map(|k| k.1).max().unwrap_or(1);
    let width = t.values().map(|v| v.to_string().len()).max().unwrap_or(1).max(k2max.to_string().len()) + 1;
    let mut header = format!("  {:>4} |", "k1\\k2");
    for k2 in 1..=k2max {
        header.push_str(&format!("{k2:>width$}"));
    }
    println!("{header}");
    for k1 in 1..=k1max {
        let mut row = format!("  {k1:>5} |");
        for k2 in 1..=k2max {
            let cell = t.get(&(k1, k2)).map(|v| v.to_string()).unwrap_or_default();
            row.push_str(&format!("{cell:>width$}"));
        }
        println!("{row}");
    }
}

fn selftest(level: Level, strict_oracles: bool) -> Result<(), Failure> {
    let tier = match level {
        Level::Quick => Tier::Quick,
        Level::Full => Tier::Full,
    };
    let results = run_all(tier, strict_oracles);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u8> = results.iter().filter(|r| r.verdict == Verdict::Fail).map(|r| r.criterion).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::check(format!("failing criteria: {failed:?}")))
    }
}

fn load_cache(path: &Path) {
    let Ok(text) = std::fs::read_to_string(path) else { return };
    let Ok(Value::Array(rows)) = serde_json::from_str::<Value>(&text) else {
        eprintln!("warning: ignoring unreadable cache {}", path.display());
        return;
    };
    let mut entries = Vec::new();
    for row in rows {
        let key: Option<[Partition; 3]> = serde_json::from_value(row["key"].clone()).ok();
        let value = LocalizedElem::from_json(&row["value"]).ok();
        if let (Some([a, b, c]), Some(v)) = (key, value) {
            entries.push(((a, b, c), v));
        }
    }
    preload_vertex_cache(entries);
}

fn save_cache(path: &Path) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let rows: Vec<Value> = vertex_cache_entries()
        .into_iter()
        .map(|((a, b, c), v)| json!({ "key": [a, b, c], "value": v.to_json() }))
        .collect();
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_string(&rows).expect("cache serializes"))?;
    std::fs::rename(tmp, path)
}
