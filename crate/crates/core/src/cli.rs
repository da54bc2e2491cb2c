//! The `weldkit` command line.
//!
//! Every subcommand builds a JSON report (`--format json`, the default) or a
//! plain-text summary. Reports carry the input echo, the parameters used and
//! the tool version, and contain nothing run-dependent, so identical
//! invocations produce identical bytes.
//!
//! Exit codes: 0 success (for `compare` and `certify`: equivalent), 10
//! distinct, 20 unknown, 1 rejected certificate, 2 bad input or usage, 70
//! internal error or a failed self-check, 78 unverified fixtures.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::braid::BraidWord;
use crate::diagram::{DiagramJson, GaussDiagram};
use crate::equivalence::{
    refute, search_certificate, verify_certificate, Bounds, Certificate, EquivalenceError, LongitudeSystem, Verdict,
};
use crate::fixtures;
use crate::group::{peripheral_system, GroupPresentation};
use crate::magnus::MAX_VARS;
use crate::milnor::{milnor_table, tables_equal, MilnorError, MilnorTable, ResidueMode};
use crate::moves::{apply_move, enumerate_moves, MoveInstance, MoveKind};
use crate::parse::parse_gauss_code;
use crate::random::corpus;
use crate::sort::sort_diagram;
use crate::word::Word;

pub const REPORT_SCHEMA: &str = "weldkit-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DISTINCT: i32 = 10;
pub const EXIT_UNKNOWN: i32 = 20;
pub const EXIT_INTERNAL: i32 = 70;
pub const EXIT_UNVERIFIED: i32 = 78;

#[derive(Parser, Debug)]
#[command(name = "weldkit", version, about = "Welded links up to self-virtualization")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads for the certificate search (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a diagram and print its normalized form.
    Parse(InputArgs),
    /// Reduce a diagram to sorted form.
    Sort {
        #[command(flatten)]
        input: InputArgs,
        /// Include the full move trace.
        #[arg(long)]
        trace: bool,
    },
    /// Wirtinger presentation, peripheral system and reduced longitudes.
    Peripheral(InputArgs),
    /// Milnor invariant table.
    Milnor {
        #[command(flatten)]
        input: InputArgs,
        /// Longest invariant, at most the component count (default: the component count).
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// Compare two diagrams: exit 0 equivalent, 10 distinct, 20 unknown.
    Compare(PairArgs),
    /// Search for an equivalence certificate, or check one with `--check`.
    Certify {
        #[command(flatten)]
        pair: PairArgs,
        /// Certificate to verify instead of searching.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Closure of a braid word.
    Braid {
        #[arg(long)]
        strands: usize,
        /// Braid word such as `s1 s2^-1`; `-` or omitted reads stdin.
        #[arg(long)]
        word: Option<String>,
        #[arg(conflicts_with = "word")]
        positional: Option<String>,
    },
    /// Run a built-in example.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        /// Run on fixtures that are not marked verified.
        #[arg(long)]
        allow_unverified: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check invariance properties on a seeded random corpus.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 10)]
        max_arrows: usize,
        /// Random moves checked per diagram.
        #[arg(long, default_value_t = 20)]
        moves: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Hopf,
    Borromean,
    Hughes,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Gauss code, diagram JSON, `@path` to read a file, or `-` for stdin.
    pub input: String,
    /// Read the input as a braid word on this many strands.
    #[arg(long)]
    pub strands: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// First diagram (same forms as for single inputs).
    pub a: String,
    /// Second diagram; if both are `-`, stdin holds one per line.
    pub b: String,
    #[arg(long)]
    pub strands: Option<usize>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SearchArgs {
    /// Longest invariant used to refute (default: the component count).
    #[arg(long)]
    pub max_length: Option<usize>,
    /// Longitude moves allowed along one search path.
    #[arg(long)]
    pub search_depth: Option<usize>,
    /// Elementary conjugations per component.
    #[arg(long)]
    pub conj_len: Option<usize>,
    /// Coset insertions per component.
    #[arg(long)]
    pub coset_max: Option<usize>,
    /// Distinct search states before giving up.
    #[arg(long)]
    pub max_states: Option<usize>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INTERNAL, message: message.into() }
    }
}

impl From<EquivalenceError> for CliError {
    fn from(e: EquivalenceError) -> Self {
        match e {
            EquivalenceError::ComponentMismatch(..)
            | EquivalenceError::TooManyComponents(_)
            | EquivalenceError::LetterOutOfRange { .. }
            | EquivalenceError::WrongCount { .. }
            | EquivalenceError::Milnor(MilnorError::TooManyComponents(_) | MilnorError::BadLength(_)) => {
                CliError::usage(e.to_string())
            }
            EquivalenceError::Malformed { .. } => CliError { code: EXIT_REJECTED, message: e.to_string() },
            _ => CliError::internal(e.to_string()),
        }
    }
}

impl From<MilnorError> for CliError {
    fn from(e: MilnorError) -> Self {
        match e {
            MilnorError::TooManyComponents(_) | MilnorError::BadLength(_) => CliError::usage(e.to_string()),
            _ => CliError::internal(e.to_string()),
        }
    }
}

/// What a subcommand produced: an exit code and both renderings.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub text: String,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => self.text.clone(),
        }
    }
}

/// Parses arguments, runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I, stdin: &mut dyn std::io::Read) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK { (code, text, String::new()) } else { (code, String::new(), text) };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return (EXIT_USAGE, String::new(), "error: --threads must be positive\n".into());
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let format = cli.format;
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli.command, stdin)));
    match result {
        Ok(Ok(outcome)) => (outcome.code, outcome.render(format), String::new()),
        Ok(Err(e)) => (e.code, String::new(), format!("error: {}\n", e.message)),
        Err(_) => (EXIT_INTERNAL, String::new(), "error: internal invariant violated\n".into()),
    }
}

pub fn run(command: Command, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    match command {
        Command::Parse(input) => cmd_parse(&input, stdin),
        Command::Sort { input, trace } => cmd_sort(&input, trace, stdin),
        Command::Peripheral(input) => cmd_peripheral(&input, stdin),
        Command::Milnor { input, max_length } => cmd_milnor(&input, max_length, stdin),
        Command::Compare(pair) => cmd_compare(&pair, stdin),
        Command::Certify { pair, check } => match check {
            Some(path) => cmd_check(&pair, &path, stdin),
            None => cmd_certify(&pair, stdin),
        },
        Command::Braid { strands, word, positional } => cmd_braid(strands, word.or(positional), stdin),
        Command::Demo { name, allow_unverified, search } => cmd_demo(name, allow_unverified, &search),
        Command::Fuzz { seed, count, max_n, max_arrows, moves } => cmd_fuzz(seed, count, max_n, max_arrows, moves),
    }
}

fn report(command: &str, input: Value, parameters: Value, result: Value) -> Value {
    json!({
        "schema": REPORT_SCHEMA,
        "tool": { "name": "weldkit", "version": env!("CARGO_PKG_VERSION") },
        "command": command,
        "input": input,
        "parameters": parameters,
        "result": result,
    })
}

struct Loaded {
    diagram: GaussDiagram,
    echo: Value,
}

fn read_stdin(stdin: &mut dyn std::io::Read) -> Result<String, CliError> {
    let mut s = String::new();
    stdin.read_to_string(&mut s).map_err(|e| CliError::usage(format!("reading stdin: {e}")))?;
    Ok(s)
}

fn source_text(arg: &str, stdin: &mut dyn std::io::Read) -> Result<(String, Value), CliError> {
    if arg == "-" {
        Ok((read_stdin(stdin)?, json!("stdin")))
    } else if let Some(path) = arg.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("reading {path}: {e}")))?;
        Ok((text, json!({ "file": path })))
    } else {
        Ok((arg.to_string(), json!("inline")))
    }
}

fn load_text(text: &str, source: Value, strands: Option<usize>) -> Result<Loaded, CliError> {
    let text = text.trim();
    let diagram = match strands {
        Some(s) => BraidWord::parse(s, text).map_err(|e| CliError::usage(e.to_string()))?.closure(),
        None if text.starts_with('{') => {
            let json: DiagramJson =
                serde_json::from_str(text).map_err(|e| CliError::usage(format!("diagram JSON: {e}")))?;
            GaussDiagram::from_json(&json).map_err(|e| CliError::usage(e.to_string()))?
        }
        None => parse_gauss_code(text).map_err(|e| CliError::usage(e.to_string()))?,
    };
    let mut echo = json!({ "source": source, "text": text, "gauss_code": diagram.to_gauss_code() });
    if let Some(s) = strands {
        echo["strands"] = json!(s);
    }
    Ok(Loaded { diagram, echo })
}

fn load(input: &InputArgs, stdin: &mut dyn std::io::Read) -> Result<Loaded, CliError> {
    let (text, source) = source_text(&input.input, stdin)?;
    load_text(&text, source, input.strands)
}

fn load_pair(pair: &PairArgs, stdin: &mut dyn std::io::Read) -> Result<(Loaded, Loaded), CliError> {
    if pair.a == "-" && pair.b == "-" {
        let all = read_stdin(stdin)?;
        let lines: Vec<&str> = all.lines().filter(|l| !l.trim().is_empty()).collect();
        if lines.len() != 2 {
            return Err(CliError::usage(format!("expected two non-empty lines on stdin, got {}", lines.len())));
        }
        return Ok((load_text(lines[0], json!("stdin"), pair.strands)?, load_text(lines[1], json!("stdin"), pair.strands)?));
    }
    let (ta, sa) = source_text(&pair.a, stdin)?;
    let (tb, sb) = source_text(&pair.b, stdin)?;
    Ok((load_text(&ta, sa, pair.strands)?, load_text(&tb, sb, pair.strands)?))
}

fn positive(name: &str, v: Option<usize>) -> Result<Option<usize>, CliError> {
    match v {
        Some(0) => Err(CliError::usage(format!("--{name} must be positive"))),
        other => Ok(other),
    }
}

fn bounds_from(search: &SearchArgs, n: usize) -> Result<Bounds, CliError> {
    let mut b = Bounds::default();
    if let Some(v) = positive("search-depth", search.search_depth)? {
        b.depth = v;
    }
    if let Some(v) = positive("conj-len", search.conj_len)? {
        b.conj_len = v;
    }
    if let Some(v) = positive("coset-max", search.coset_max)? {
        b.coset_max = v;
    }
    if let Some(v) = positive("max-states", search.max_states)? {
        b.max_states = v;
    }
    if let Some(k) = positive("max-length", search.max_length)? {
        check_length(k, n)?;
        b.max_length = k;
    }
    Ok(b)
}

fn check_length(k: usize, n: usize) -> Result<(), CliError> {
    if k < 2 || k > n {
        return Err(CliError::usage(format!("--max-length {k} out of range: need 2 <= length <= {n} components")));
    }
    Ok(())
}

fn render_named(w: &Word, names: &[String]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.letters()
        .iter()
        .map(|l| if l.exp() < 0 { format!("{}^-1", names[l.gen]) } else { names[l.gen].clone() })
        .collect::<Vec<_>>()
        .join(" ")
}

fn system_json(s: &LongitudeSystem) -> Value {
    json!({
        "n": s.n,
        "longitudes": s.longitudes.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
    })
}

fn cmd_parse(input: &InputArgs, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    let l = load(input, stdin)?;
    let d = &l.diagram;
    let writhes: Vec<i64> = (0..d.n()).map(|c| d.self_writhe(c)).collect();
    let key: String = d.canonical_key().iter().map(|b| format!("{b:02x}")).collect();
    let result = json!({
        "gauss_code": d.to_gauss_code(),
        "diagram": d.to_json(),
        "components": d.n(),
        "arrows": d.arrow_count(),
        "self_writhe": writhes,
        "sorted": d.is_sorted(),
        "canonical_key": key,
    });
    let text = format!(
        "{}\ncomponents {}  arrows {}  sorted {}\nself-writhe {:?}\n",
        d.to_gauss_code(),
        d.n(),
        d.arrow_count(),
        d.is_sorted(),
        writhes
    );
    Ok(Outcome { code: EXIT_OK, report: report("parse", l.echo, json!({}), result), text })
}

fn cmd_sort(input: &InputArgs, with_trace: bool, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    let l = load(input, stdin)?;
    let s = sort_diagram(&l.diagram).map_err(|e| CliError::internal(e.to_string()))?;
    let mut result = json!({
        "gauss_code": s.diagram.to_gauss_code(),
        "arrows": s.diagram.arrow_count(),
        "steps": s.trace.len(),
    });
    let mut text = format!("{}\n{} arrows after {} steps\n", s.diagram.to_gauss_code(), s.diagram.arrow_count(), s.trace.len());
    if with_trace {
        let lines = s.trace.to_json_lines();
        let parsed: Vec<Value> = lines.lines().skip(1).map(|l| serde_json::from_str(l).expect("trace lines are JSON")).collect();
        result["trace"] = Value::Array(parsed);
        text.push_str(&lines);
    }
    Ok(Outcome { code: EXIT_OK, report: report("sort", l.echo, json!({ "trace": with_trace }), result), text })
}

fn presentation_json(p: &GroupPresentation) -> Value {
    let ab = p.abelianization();
    json!({
        "generators": p.generators,
        "relators": p.relators.iter().map(|r| render_named(r, &p.generators)).collect::<Vec<_>>(),
        "abelianization": {
            "free_rank": ab.free_rank,
            "torsion": ab.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        },
    })
}

fn cmd_peripheral(input: &InputArgs, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    let l = load(input, stdin)?;
    let p = peripheral_system(&l.diagram);
    let names = &p.presentation.generators;
    let reduced = LongitudeSystem::from_diagram(&l.diagram)?;
    let result = json!({
        "presentation": presentation_json(&p.presentation),
        "meridians": p.meridians.iter().map(|&m| names[m].clone()).collect::<Vec<_>>(),
        "longitudes": p.longitudes.iter().map(|w| render_named(w, names)).collect::<Vec<_>>(),
        "self_writhe": p.self_writhe,
        "reduced": system_json(&reduced),
    });
    let mut text = String::new();
    let _ = writeln!(text, "generators {}", names.join(" "));
    for r in &p.presentation.relators {
        let _ = writeln!(text, "relator {}", render_named(r, names));
    }
    for (c, w) in p.longitudes.iter().enumerate() {
        let _ = writeln!(text, "component {}: meridian {}  longitude {}", c + 1, names[p.meridians[c]], render_named(w, names));
    }
    for (c, w) in reduced.longitudes.iter().enumerate() {
        let _ = writeln!(text, "reduced l{} = {}", c + 1, w);
    }
    Ok(Outcome { code: EXIT_OK, report: report("peripheral", l.echo, json!({}), result), text })
}

fn table_for(d: &GaussDiagram, max_length: Option<usize>) -> Result<MilnorTable, CliError> {
    let n = d.n();
    if n > MAX_VARS {
        return Err(CliError::usage(format!("at most {MAX_VARS} components are supported, got {n}")));
    }
    let k = match max_length {
        Some(k) => {
            check_length(k, n)?;
            k
        }
        None => n,
    };
    if n < 2 {
        return Ok(MilnorTable { n, max_length: k, entries: Vec::new() });
    }
    Ok(milnor_table(d, k)?)
}

fn cmd_milnor(input: &InputArgs, max_length: Option<usize>, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    let l = load(input, stdin)?;
    let t = table_for(&l.diagram, max_length)?;
    let result = json!({
        "table": t.to_json(),
        "first_nonvanishing": t.first_nonvanishing().map(|e| e.label()),
    });
    let params = json!({ "max_length": t.max_length });
    Ok(Outcome { code: EXIT_OK, report: report("milnor", l.echo, params, result), text: t.to_text() })
}

fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Equivalent { .. } => EXIT_OK,
        Verdict::Distinct { .. } => EXIT_DISTINCT,
        Verdict::Unknown { .. } => EXIT_UNKNOWN,
    }
}

fn verdict_text(v: &Verdict) -> String {
    let mut text = format!("{v}\n");
    if let Verdict::Distinct { witness } = v {
        let _ = writeln!(text, "left  mu{} = {} (mod {})", witness.left.label(), witness.left.mu, witness.left.delta);
        let _ = writeln!(text, "right mu{} = {} (mod {})", witness.right.label(), witness.right.mu, witness.right.delta);
    }
    text
}

fn systems(a: &Loaded, b: &Loaded) -> Result<(LongitudeSystem, LongitudeSystem), CliError> {
    if a.diagram.n() != b.diagram.n() {
        return Err(EquivalenceError::ComponentMismatch(a.diagram.n(), b.diagram.n()).into());
    }
    Ok((LongitudeSystem::from_diagram(&a.diagram)?, LongitudeSystem::from_diagram(&b.diagram)?))
}

fn search(pair: &PairArgs, command: &str, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    let (a, b) = load_pair(pair, stdin)?;
    let bounds = bounds_from(&pair.search, a.diagram.n())?;
    let (sa, sb) = systems(&a, &b)?;
    let v = search_certificate(&sa, &sb, &bounds)?;
    let result = json!({
        "verdict": serde_json::to_value(&v).expect("verdicts serialize"),
        "systems": [system_json(&sa), system_json(&sb)],
    });
    let input = json!({ "a": a.echo, "b": b.echo });
    let params = json!({ "bounds": bounds });
    let mut text = verdict_text(&v);
    if command == "certify" {
        if let Verdict::Equivalent { certificate } = &v {
            text.push_str(&serde_json::to_string_pretty(certificate).expect("certificates serialize"));
            text.push('\n');
        }
    }
    Ok(Outcome { code: verdict_code(&v), report: report(command, input, params, result), text })
}

fn cmd_compare(pair: &PairArgs, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    search(pair, "compare", stdin)
}

fn cmd_certify(pair: &PairArgs, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    search(pair, "certify", stdin)
}

/// Accepts a bare certificate or a `certify` report containing one.
fn read_certificate(path: &PathBuf) -> Result<Certificate, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("reading {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("certificate JSON: {e}")))?;
    let inner = if v.get("steps").is_some() {
        v
    } else {
        match v.pointer("/result/verdict/certificate") {
            Some(c) => c.clone(),
            None => return Err(CliError::usage("no certificate found (expected \"steps\" or a certify report)")),
        }
    };
    serde_json::from_value(inner).map_err(|e| CliError { code: EXIT_REJECTED, message: format!("certificate: {e}") })
}

fn cmd_check(pair: &PairArgs, path: &PathBuf, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    let cert = read_certificate(path)?;
    let (a, b) = load_pair(pair, stdin)?;
    let (sa, sb) = systems(&a, &b)?;
    let (valid, reason) = match verify_certificate(&sa, &sb, &cert) {
        Ok(true) => (true, None),
        Ok(false) => (false, Some("replayed longitudes differ from the first system".to_string())),
        Err(e @ EquivalenceError::Malformed { .. }) => (false, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let result = json!({ "valid": valid, "reason": reason, "steps": cert.steps.len() });
    let input = json!({ "a": a.echo, "b": b.echo, "certificate": path.display().to_string() });
    let text = match &reason {
        None => format!("certificate valid ({} steps)\n", cert.steps.len()),
        Some(r) => format!("certificate rejected: {r}\n"),
    };
    let code = if valid { EXIT_OK } else { EXIT_REJECTED };
    Ok(Outcome { code, report: report("certify-check", input, json!({}), result), text })
}

fn cmd_braid(strands: usize, word: Option<String>, stdin: &mut dyn std::io::Read) -> Result<Outcome, CliError> {
    let (text, source) = match word.as_deref() {
        None | Some("-") => (read_stdin(stdin)?, json!("stdin")),
        Some(w) => source_text(w, stdin)?,
    };
    let b = BraidWord::parse(strands, text.trim()).map_err(|e| CliError::usage(e.to_string()))?;
    let d = b.closure();
    let result = json!({
        "gauss_code": d.to_gauss_code(),
        "diagram": d.to_json(),
        "components": d.n(),
        "permutation": b.permutation().iter().map(|p| p + 1).collect::<Vec<_>>(),
    });
    let input = json!({ "source": source, "strands": strands, "word": b.to_string() });
    let out = format!("{}\n{} components\n", d.to_gauss_code(), d.n());
    Ok(Outcome { code: EXIT_OK, report: report("braid", input, json!({}), result), text: out })
}

fn cmd_demo(name: DemoName, allow_unverified: bool, search: &SearchArgs) -> Result<Outcome, CliError> {
    match name {
        DemoName::Hopf => {
            let f = fixtures::hopf();
            let (p, m) = f.diagrams();
            let (sa, sb) = (LongitudeSystem::from_diagram(&p)?, LongitudeSystem::from_diagram(&m)?);
            let v = search_certificate(&sa, &sb, &bounds_from(search, 2)?)?;
            let ok = matches!(v, Verdict::Distinct { .. });
            let result = json!({ "verdict": serde_json::to_value(&v).expect("verdicts serialize"), "claim_holds": ok });
            let input = json!({ "fixture": "hopf", "status": f.status.name(), "a": f.positive, "b": f.negative });
            let text = format!("positive vs negative Hopf link: {}", verdict_text(&v));
            Ok(Outcome { code: if ok { EXIT_OK } else { EXIT_INTERNAL }, report: report("demo", input, json!({}), result), text })
        }
        DemoName::Borromean => {
            let f = fixtures::borromean();
            let d = f.diagram();
            let t = table_for(&d, None)?;
            let first = t.first_nonvanishing().cloned();
            let ok = first.as_ref().is_some_and(|e| e.len() == 3);
            let result = json!({
                "table": t.to_json(),
                "first_nonvanishing": first.as_ref().map(|e| e.label()),
                "claim_holds": ok,
            });
            let input = json!({ "fixture": "borromean", "status": f.status.name(), "strands": f.strands, "braid": f.braid });
            let mut text = t.to_text();
            if let Some(e) = &first {
                let _ = writeln!(text, "first nonvanishing: mu{} = {}", e.label(), e.mubar);
            }
            Ok(Outcome { code: if ok { EXIT_OK } else { EXIT_INTERNAL }, report: report("demo", input, json!({}), result), text })
        }
        DemoName::Hughes => demo_hughes(allow_unverified, search),
    }
}

fn demo_hughes(allow_unverified: bool, search: &SearchArgs) -> Result<Outcome, CliError> {
    let f = fixtures::hughes();
    if !f.status.is_verified() && !allow_unverified {
        return Err(CliError {
            code: EXIT_UNVERIFIED,
            message: format!(
                "the Hughes fixtures are marked {:?}; they are not the published braids (see fixtures/README.md). \
                 Pass --allow-unverified to run on them anyway.",
                f.status.name()
            ),
        });
    }
    let (d1, d2) = f.diagrams();
    let n = d1.n();
    let top = n.min(4);
    let t1 = table_for(&d1, Some(top))?;
    let t2 = table_for(&d2, Some(top))?;
    let tables_agree = tables_equal(&t1, &t2, ResidueMode::Residue).is_ok();
    let (s1, s2) = (LongitudeSystem::from_diagram(&d1)?, LongitudeSystem::from_diagram(&d2)?);
    let mut per_length = Vec::new();
    for k in 2..=top {
        per_length.push(json!({ "max_length": k, "distinct": refute(&s1, &s2, k)?.is_some() }));
    }
    let v = search_certificate(&s1, &s2, &bounds_from(search, n)?)?;
    let ok = tables_agree && !matches!(v, Verdict::Distinct { .. }) && per_length.iter().all(|p| p["distinct"] == false);
    let result = json!({
        "tables_agree": tables_agree,
        "max_length": top,
        "refutation_by_length": per_length,
        "table_h1": t1.to_json(),
        "table_h2": t2.to_json(),
        "verdict": serde_json::to_value(&v).expect("verdicts serialize"),
        "claim_holds": ok,
    });
    let input = json!({ "fixture": "hughes", "status": f.status.name(), "strands": f.strands, "h1": f.h1, "h2": f.h2 });
    let mut text = String::new();
    if !f.status.is_verified() {
        let _ = writeln!(text, "WARNING: fixtures are marked {}, not the published braids", f.status.name());
    }
    let _ = writeln!(text, "residue tables through length {top}: {}", if tables_agree { "equal" } else { "DIFFER" });
    let _ = write!(text, "verdict: {}", verdict_text(&v));
    Ok(Outcome { code: if ok { EXIT_OK } else { EXIT_INTERNAL }, report: report("demo", input, json!({}), result), text })
}

fn residues_match(a: &GaussDiagram, b: &GaussDiagram) -> Result<bool, CliError> {
    let ta = table_for(a, None)?;
    let tb = table_for(b, None)?;
    Ok(tables_equal(&ta, &tb, ResidueMode::Residue).is_ok())
}

fn cmd_fuzz(seed: u64, count: usize, max_n: usize, max_arrows: usize, moves: usize) -> Result<Outcome, CliError> {
    if !(2..=MAX_VARS).contains(&max_n) {
        return Err(CliError::usage(format!("--max-n must lie in 2..={MAX_VARS}")));
    }
    let diagrams = corpus(seed, count, max_n, max_arrows);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut failures = Vec::new();
    let (mut sv_checks, mut move_checks) = (0usize, 0usize);
    for d in &diagrams {
        for a in (0..d.arrow_count()).filter(|&a| d.arrow(a).is_self_arrow()) {
            let e = apply_move(d, &MoveInstance::SvDel { arrow: a }).map_err(|e| CliError::internal(e.to_string()))?;
            sv_checks += 1;
            if !residues_match(d, &e)? {
                failures.push(json!({ "check": "sv", "diagram": d.to_gauss_code(), "arrow": a }));
            }
        }
        let all = enumerate_moves(d, &MoveKind::WELDED);
        for _ in 0..moves.min(all.len()) {
            let m = &all[rng.gen_range(0..all.len())];
            let e = apply_move(d, m).map_err(|e| CliError::internal(e.to_string()))?;
            move_checks += 1;
            if !residues_match(d, &e)? {
                failures.push(json!({ "check": "move", "diagram": d.to_gauss_code(), "move": m }));
            }
        }
        let s = sort_diagram(d).map_err(|e| CliError::internal(e.to_string()))?;
        if !s.diagram.is_sorted() || s.trace.verify().is_err() || !residues_match(d, &s.diagram)? {
            failures.push(json!({ "check": "sort", "diagram": d.to_gauss_code() }));
        }
    }
    let result = json!({
        "diagrams": diagrams.len(),
        "sv_checks": sv_checks,
        "move_checks": move_checks,
        "sort_checks": diagrams.len(),
        "failures": failures,
    });
    let params = json!({ "seed": seed, "count": count, "max_n": max_n, "max_arrows": max_arrows, "moves": moves });
    let text = format!(
        "{} diagrams: {} sv checks, {} move checks, {} sorts, {} failures\n",
        diagrams.len(),
        sv_checks,
        move_checks,
        diagrams.len(),
        failures.len()
    );
    let code = if failures.is_empty() { EXIT_OK } else { EXIT_INTERNAL };
    Ok(Outcome { code, report: report("fuzz", json!({}), params, result), text })
}
