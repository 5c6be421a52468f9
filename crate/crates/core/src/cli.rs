//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage (bad flags or type name), 2 validation
//! (invalid datum, modulus or argument value), 3 verification failure,
//! 4 resource cap exceeded.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::adjoint::{
    build_e, build_e_divided, build_f, build_f_divided, build_k, Basis, ModuleOperator,
};
use crate::cartan::{validate, CartanDatum};
use crate::chevalley::{self, Closure, PrimeField, DEFAULT_CAP};
use crate::qpoly::LaurentPoly;
use crate::roots::RootSystem;
use crate::verify::{self, GramMatrix, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_CAP: i32 = 4;

/// Matrices wider than this are listed entry by entry in text output.
const TABLE_MAX_DIM: usize = 32;

#[derive(Debug, Parser)]
#[command(name = "qadjoint", version, about = "Quantum adjoint representation toolkit")]
struct Cli {
    /// Output format (text by default, json for `chevalley`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Relations,
    Form,
    Strings,
    Bar,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Closed,
    Contract,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Roots, positive roots, highest root, string lengths and root facts.
    Roots {
        /// Preset name (e.g. G2) or path to a JSON dot-product matrix.
        type_spec: String,
    },
    /// Generator matrices on the canonical basis.
    Matrices {
        type_spec: String,
        /// One generator: E:i, F:i (nodes from 1) or K:y with y comma-separated.
        #[arg(long = "gen")]
        generator: Option<String>,
        /// Divided power k of E/F.
        #[arg(long)]
        divided: Option<u32>,
    },
    /// Run verification checks; exit 3 if any fails.
    Verify {
        type_spec: String,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
    /// Gram matrix of the contravariant form.
    Gram {
        type_spec: String,
        #[arg(long, value_enum, default_value = "both")]
        source: Source,
    },
    /// Chevalley group over F_p.
    Chevalley {
        type_spec: String,
        /// Prime modulus.
        #[arg(long = "p")]
        p: u64,
        /// Enumerate the group order (the default when no action is given).
        #[arg(long)]
        order: bool,
        /// Check the one-parameter subgroup property exhaustively (p <= 101).
        #[arg(long)]
        check_one_param: bool,
        /// Stop enumerating after this many elements.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
}

/// A failed invocation: exit code and message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: message.into() }
    }
}

/// Successful output plus the exit code it implies (0, 3 or 4).
struct Output {
    code: i32,
    body: String,
}

/// Parses `args` (including the program name), runs the command and writes
/// to the given streams. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(output) => {
            let _ = out.write_all(output.body.as_bytes());
            output.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            if f.code == EXIT_USAGE {
                let _ = writeln!(err, "\nFor more information, try '--help'.");
            }
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    let format = |default| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Roots { type_spec } => roots_cmd(&load(type_spec)?, format(Format::Text)),
        Command::Matrices { type_spec, generator, divided } => {
            matrices_cmd(&load(type_spec)?, generator.as_deref(), *divided, format(Format::Text))
        }
        Command::Verify { type_spec, suite } => verify_cmd(&load(type_spec)?, *suite, format(Format::Text)),
        Command::Gram { type_spec, source } => gram_cmd(&load(type_spec)?, *source, format(Format::Text)),
        Command::Chevalley { type_spec, p, order, check_one_param, cap } => {
            let rs = load(type_spec)?;
            let field = PrimeField::new(*p).map_err(|e| Failure::validation(e.to_string()))?;
            let want_order = *order || !*check_one_param;
            chevalley_cmd(&rs, field, want_order, *check_one_param, *cap, format(Format::Json))
        }
    }
}

/// A preset name, or a path to a JSON integer matrix.
fn load(type_spec: &str) -> Result<RootSystem, Failure> {
    let datum = if Path::new(type_spec).is_file() {
        let text = std::fs::read_to_string(type_spec)
            .map_err(|e| Failure::usage(format!("cannot read {type_spec}: {e}")))?;
        let raw: Vec<Vec<i64>> = serde_json::from_str(&text).map_err(|e| {
            Failure::validation(format!("{type_spec} is not a JSON integer matrix: {e}"))
        })?;
        validate(&raw).map_err(|report| {
            let detail = serde_json::to_string(&report).unwrap_or_default();
            Failure::validation(format!("invalid Cartan datum: {report}\n{detail}"))
        })?
    } else {
        CartanDatum::from_name(type_spec).map_err(|e| {
            Failure::usage(format!("unknown type {type_spec:?}: {e}; give a preset name or a path to a JSON matrix"))
        })?
    };
    RootSystem::generate(datum).map_err(|e| Failure::validation(e.to_string()))
}

fn render_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output is serializable");
    s.push('\n');
    s
}

fn poly_rows(rows: impl Iterator<Item = impl AsRef<[LaurentPoly]>>) -> Vec<Vec<String>> {
    rows.map(|r| r.as_ref().iter().map(LaurentPoly::to_string).collect()).collect()
}

fn table(labels: &[String], cells: &[Vec<String>]) -> String {
    let width = cells.iter().flatten().chain(labels).map(String::len).max().unwrap_or(1);
    let mut s = String::new();
    let _ = write!(s, "{:>width$}", "");
    for l in labels {
        let _ = write!(s, "  {l:>width$}");
    }
    s.push('\n');
    for (l, row) in labels.iter().zip(cells) {
        let _ = write!(s, "{l:>width$}");
        for c in row {
            let shown = if c == "0" { "." } else { c.as_str() };
            let _ = write!(s, "  {shown:>width$}");
        }
        s.push('\n');
    }
    s
}

fn roots_cmd(rs: &RootSystem, format: Format) -> Result<Output, Failure> {
    let d = rs.datum();
    let report = rs.check_root_facts();
    let code = if report.all_pass() { EXIT_OK } else { EXIT_VERIFICATION };
    let strings: Vec<Value> = d
        .nodes()
        .flat_map(|i| {
            (0..rs.len()).map(move |n| json!({"node": i + 1, "root": rs.root(n).coords(), "p": rs.p(i, n), "q": rs.q(i, n)}))
        })
        .collect();
    let body = match format {
        Format::Json => render_json(&json!({
            "type": d.name(),
            "rank": d.rank(),
            "e": d.e(),
            "dot": d.dot(),
            "roots": rs.roots().iter().map(|r| r.coords()).collect::<Vec<_>>(),
            "positive": rs.positive().iter().map(|r| r.coords()).collect::<Vec<_>>(),
            "highest_root": rs.alpha0().coords(),
            "strings": strings,
            "report": report,
        })),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "type {}  rank {}  e {}  |R| {}  |R+| {}", d.name(), d.rank(), d.e(), rs.len(), rs.n_positive());
            let _ = writeln!(s, "highest root {}", rs.alpha0());
            let _ = writeln!(s, "\npositive roots (height, class, q/p per node):");
            for n in 0..rs.n_positive() {
                let qp: Vec<String> = d.nodes().map(|i| format!("{}/{}", rs.q(i, n), rs.p(i, n))).collect();
                let class = serde_json::to_value(rs.class(n)).unwrap();
                let _ = writeln!(s, "  {:<16} {:>3}  {:<7}  {}", rs.root(n).to_string(), rs.height(n), class.as_str().unwrap_or(""), qp.join(" "));
            }
            let _ = writeln!(s, "\nnegative roots: the negatives of the above, same order");
            let _ = write!(s, "\nroot facts: {report}");
            s
        }
    };
    Ok(Output { code, body })
}

fn node_arg(rs: &RootSystem, text: &str) -> Result<usize, Failure> {
    let n: usize = text.trim().parse().map_err(|_| Failure::usage(format!("bad node {text:?}")))?;
    if n == 0 || n > rs.rank() {
        return Err(Failure::usage(format!("node {n} out of range 1..={}", rs.rank())));
    }
    Ok(n - 1)
}

fn matrices_cmd(
    rs: &RootSystem,
    generator: Option<&str>,
    divided: Option<u32>,
    format: Format,
) -> Result<Output, Failure> {
    let raise = |i: usize| match divided {
        Some(k) => build_e_divided(rs, i, k),
        None => build_e(rs, i),
    };
    let lower = |i: usize| match divided {
        Some(k) => build_f_divided(rs, i, k),
        None => build_f(rs, i),
    };
    let ops: Vec<ModuleOperator> = match generator {
        None => rs.datum().nodes().map(raise).chain(rs.datum().nodes().map(lower)).collect(),
        Some(g) => {
            let (kind, arg) = g
                .split_once(':')
                .ok_or_else(|| Failure::usage(format!("bad generator {g:?}; expected E:i, F:i or K:y")))?;
            match kind {
                "E" => vec![raise(node_arg(rs, arg)?)],
                "F" => vec![lower(node_arg(rs, arg)?)],
                "K" => {
                    if divided.is_some() {
                        return Err(Failure::usage("--divided applies to E and F only"));
                    }
                    let y = arg
                        .split(',')
                        .map(|t| t.trim().parse::<i64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| Failure::usage(format!("bad K vector {arg:?}")))?;
                    if y.len() != rs.rank() {
                        return Err(Failure::usage(format!("K vector needs {} entries", rs.rank())));
                    }
                    vec![build_k(rs, &y)]
                }
                _ => return Err(Failure::usage(format!("bad generator {g:?}; expected E:i, F:i or K:y"))),
            }
        }
    };
    let basis = Basis::new(rs);
    let body = match format {
        Format::Json => render_json(&json!({
            "type": rs.datum().name(),
            "basis": basis.labels(),
            "operators": ops.iter().map(|op| json!({
                "label": op.label().to_string(),
                "matrix": poly_rows(op.rows()),
            })).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "type {}  dim {}", rs.datum().name(), basis.dim());
            let _ = writeln!(s, "basis:");
            for (n, l) in basis.labels().iter().enumerate() {
                let _ = writeln!(s, "  {n:>3}  {l}");
            }
            for op in &ops {
                let _ = writeln!(s, "\n{}:", op.label());
                if basis.dim() <= TABLE_MAX_DIM {
                    s.push_str(&table(basis.labels(), &poly_rows(op.rows())));
                } else {
                    for (r, c, p) in op.nonzero_entries() {
                        let _ = writeln!(s, "  [{}, {}] = {p}", basis.label(r), basis.label(c));
                    }
                }
            }
            s
        }
    };
    Ok(Output { code: EXIT_OK, body })
}

fn verify_cmd(rs: &RootSystem, suite: SuiteArg, format: Format) -> Result<Output, Failure> {
    let suite = match suite {
        SuiteArg::Relations => Suite::Relations,
        SuiteArg::Form => Suite::Form,
        SuiteArg::Strings => Suite::Strings,
        SuiteArg::Bar => Suite::Bar,
        SuiteArg::All => Suite::All,
    };
    let report = verify::run_suite(rs, suite);
    let code = if report.all_pass() { EXIT_OK } else { EXIT_VERIFICATION };
    let body = match format {
        Format::Json => render_json(&json!({
            "type": rs.datum().name(),
            "all_pass": report.all_pass(),
            "checks": report.checks,
        })),
        Format::Text => format!("type {}\n{report}\n", rs.datum().name()),
    };
    Ok(Output { code, body })
}

fn gram_cmd(rs: &RootSystem, source: Source, format: Format) -> Result<Output, Failure> {
    let basis = Basis::new(rs);
    let closed = matches!(source, Source::Closed | Source::Both).then(|| verify::gram_closed_form(rs));
    let contract = match source {
        Source::Contract | Source::Both => match verify::gram_from_contract(rs) {
            Ok(g) => Some(g),
            Err(e) => {
                return Ok(Output {
                    code: EXIT_VERIFICATION,
                    body: match format {
                        Format::Json => render_json(&json!({"type": rs.datum().name(), "error": e.to_string()})),
                        Format::Text => format!("type {}\ncontract system: {e}\n", rs.datum().name()),
                    },
                })
            }
        },
        Source::Closed => None,
    };
    let diff: Option<Vec<(usize, usize)>> = match (&closed, &contract) {
        (Some(a), Some(b)) => Some(a.differences(b)),
        _ => None,
    };
    let code = match &diff {
        Some(d) if !d.is_empty() => EXIT_VERIFICATION,
        _ => EXIT_OK,
    };
    let cells = |g: &GramMatrix| poly_rows(g.rows());
    let body = match format {
        Format::Json => {
            let mut v = json!({"type": rs.datum().name(), "basis": basis.labels()});
            if let Some(g) = &closed {
                v["closed"] = json!(cells(g));
            }
            if let Some(g) = &contract {
                v["contract"] = json!(cells(g));
            }
            if let (Some(d), Some(a), Some(b)) = (&diff, &closed, &contract) {
                v["diff"] = json!(d
                    .iter()
                    .map(|&(r, c)| json!({
                        "row": basis.label(r),
                        "col": basis.label(c),
                        "closed": a.entry(r, c).to_string(),
                        "contract": b.entry(r, c).to_string(),
                    }))
                    .collect::<Vec<_>>());
            }
            render_json(&v)
        }
        Format::Text => {
            let mut s = format!("type {}  dim {}\n", rs.datum().name(), basis.dim());
            for (name, g) in [("closed form", &closed), ("solved from contract", &contract)] {
                if let Some(g) = g {
                    let _ = writeln!(s, "\n{name}:");
                    s.push_str(&table(basis.labels(), &cells(g)));
                }
            }
            if let (Some(d), Some(a), Some(b)) = (&diff, &closed, &contract) {
                let _ = writeln!(s, "\ndifferences: {}", d.len());
                for &(r, c) in d {
                    let _ = writeln!(s, "  ({}, {}): {} vs {}", basis.label(r), basis.label(c), a.entry(r, c), b.entry(r, c));
                }
            }
            s
        }
    };
    Ok(Output { code, body })
}

fn chevalley_cmd(
    rs: &RootSystem,
    field: PrimeField,
    want_order: bool,
    one_param: bool,
    cap: u64,
    format: Format,
) -> Result<Output, Failure> {
    let d = rs.datum();
    let dim = Basis::new(rs).dim();
    let mut code = EXIT_OK;
    let mut out = json!({"type": d.name(), "p": field.p(), "dim": dim});
    let mut text = format!("type {}  p {}  dim {}\n", d.name(), field.p(), dim);

    if one_param {
        let mut reports = Vec::new();
        for i in d.nodes() {
            let r = chevalley::one_param_check(rs, i, field).map_err(|e| Failure::validation(e.to_string()))?;
            if !r.passed() {
                code = EXIT_VERIFICATION;
            }
            let _ = writeln!(
                text,
                "one-parameter node {}: {} pairs, {} failures",
                r.node,
                r.pairs_checked,
                r.failures.len()
            );
            reports.push(r);
        }
        out["one_param"] = json!(reports);
    }

    if want_order {
        let closure = chevalley::group_closure(&chevalley::generators(rs, field), cap)
            .map_err(|e| Failure::validation(e.to_string()))?;
        match closure {
            Closure::Order(order) => {
                let classical = d
                    .preset_type()
                    .and_then(|ty| chevalley::classical_order(ty, field.p() as u64).ok());
                let matched = classical.map(|c| c == order as u128);
                out["order"] = json!(order);
                out["matched_classical"] = json!(matched);
                let _ = writeln!(text, "order {order}");
                let _ = match classical {
                    Some(c) => writeln!(text, "classical order {c}  matched {}", c == order as u128),
                    None => writeln!(text, "classical order unavailable"),
                };
            }
            Closure::Exceeded { cap } => {
                code = EXIT_CAP;
                out["order"] = Value::Null;
                out["matched_classical"] = Value::Null;
                out["cap_exceeded"] = json!(cap);
                let _ = writeln!(text, "closure exceeded cap {cap}; order unknown");
            }
        }
    }

    let body = match format {
        Format::Json => render_json(&out),
        Format::Text => text,
    };
    Ok(Output { code, body })
}
