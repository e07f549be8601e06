//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 parse or usage error,
//! 3 cap exceeded, 4 internal assertion failure.

mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use verify::{run_grid, CellReport, CheckFailure, Grid, SampleReport, VerifyReport};

use crate::algebra::{parse, Context, Degree, Element};
use crate::error::Error;
use crate::milnor::{Engine, SignRule};
use crate::obstruction::{
    detect_nonliftable, minimal_example_in, tower_degree_table, Certificate, TowerRow,
};
use crate::steenrod::{Composite, SteenrodOp};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::RecursionCap { .. } | Error::ExponentCap { .. } => EXIT_CAP,
        Error::EngineDisagreement { .. }
        | Error::Assertion(_)
        | Error::Certificate(_)
        | Error::ContextMismatch => EXIT_INTERNAL,
        _ => EXIT_PARSE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum EngineArg {
    #[default]
    Derivation,
    Recursive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum SignRuleArg {
    #[default]
    AllLevels,
    SkipLevelZero,
}

#[derive(Debug, Parser)]
#[command(
    name = "bptower",
    version,
    about = "Milnor operations on H*((Z/p)^k; F_p) and non-liftability certificates for the Brown-Peterson tower"
)]
pub struct Cli {
    /// The prime.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Number of generators.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Tower level.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Length of the class x1*...*xm.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Highest tower level for grids and tables.
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized property sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Highest Milnor index the recursive engine may expand.
    #[arg(long = "recursion-cap", global = true)]
    pub recursion_cap: Option<u32>,
    /// Largest allowed polynomial exponent.
    #[arg(long = "exp-cap", global = true)]
    pub exp_cap: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an expression such as "Q2*Q1*Q0(x1*x2*x3)". Operations apply right to left.
    Eval {
        expression: String,
        /// Evaluator used for Q_n.
        #[arg(long, value_enum, default_value_t = EngineArg::Derivation)]
        engine: EngineArg,
    },
    /// Check closed forms against both Q-engines over a (p, n, m) grid.
    Verify {
        /// Random derivation-rule samples per (p, n).
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Levels contributing to the closed-form sign.
        #[arg(long = "sign-rule", value_enum, default_value_t = SignRuleArg::AllLevels)]
        sign_rule: SignRuleArg,
    },
    /// Emit non-liftability certificates.
    Certify {
        /// One certificate per n in 0..=n-max.
        #[arg(long = "all-n")]
        all_n: bool,
        /// Write the document here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Degree table of the tower.
    Table,
}

/// What a run does, after defaults are filled in and arguments validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Eval {
        expression: String,
        engine: Engine,
    },
    Verify {
        samples: usize,
        sign_rule: SignRule,
    },
    Certify {
        all_n: bool,
        output: Option<PathBuf>,
    },
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub action: Action,
    pub p: Option<u32>,
    pub k: Option<usize>,
    pub n: Option<u32>,
    pub m: Option<usize>,
    pub n_max: Option<u32>,
    pub format: Format,
    pub seed: u64,
    pub recursion_cap: Option<u32>,
    pub exp_cap: Option<u32>,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let action = match cli.command {
            Command::Eval { expression, engine } => Action::Eval {
                expression,
                engine: match engine {
                    EngineArg::Derivation => Engine::Derivation,
                    EngineArg::Recursive => Engine::Recursive,
                },
            },
            Command::Verify { samples, sign_rule } => Action::Verify {
                samples,
                sign_rule: match sign_rule {
                    SignRuleArg::AllLevels => SignRule::AllLevels,
                    SignRuleArg::SkipLevelZero => SignRule::SkipLevelZero,
                },
            },
            Command::Certify { all_n, output } => Action::Certify { all_n, output },
            Command::Table => Action::Table,
        };
        RunConfig {
            action,
            p: cli.p,
            k: cli.k,
            n: cli.n,
            m: cli.m,
            n_max: cli.n_max,
            format: cli.format,
            seed: cli.seed,
            recursion_cap: cli.recursion_cap,
            exp_cap: cli.exp_cap,
        }
    }
}

/// Failure of a command: the exit code and a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: format!("i/o error: {e}"),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

impl RunConfig {
    fn context(&self, p: u32, k: usize) -> Result<Context, Error> {
        let mut ctx = Context::new(p, k)?;
        if let Some(cap) = self.exp_cap {
            ctx = ctx.with_exp_cap(cap);
        }
        if let Some(cap) = self.recursion_cap {
            ctx = ctx.with_recursion_cap(cap);
        }
        Ok(ctx)
    }

    fn prime(&self) -> Result<u32, Error> {
        let p = self.p.unwrap_or(2);
        Context::new(p, 1)?;
        Ok(p)
    }

    fn recursion_cap_for(&self, p: u32) -> u32 {
        self.recursion_cap
            .unwrap_or_else(|| Context::default_recursion_cap(p))
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_PARSE };
        }
    };
    execute(&RunConfig::from(cli), out, err)
}

/// Run an already-built configuration.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cfg.action {
        Action::Eval { expression, engine } => cmd_eval(cfg, expression, *engine, out),
        Action::Verify { samples, sign_rule } => cmd_verify(cfg, *samples, *sign_rule, out),
        Action::Certify { all_n, output } => cmd_certify(cfg, *all_n, output.as_ref(), out),
        Action::Table => cmd_table(cfg, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Split `ops(element)` into its two halves; a bare element has no operations.
fn split_expression(expr: &str) -> std::result::Result<(Option<&str>, &str), Error> {
    let trimmed = expr.trim();
    match trimmed.find('(') {
        None => Ok((None, trimmed)),
        Some(open) => {
            let Some(inner) = trimmed[open + 1..].strip_suffix(')') else {
                return Err(Error::Parse {
                    pos: expr.len(),
                    msg: "expected ')' at the end of the expression".into(),
                });
            };
            Ok((Some(&trimmed[..open]), inner))
        }
    }
}

/// Largest generator index mentioned in an element string.
fn max_generator_index(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 1;
    let mut i = 0;
    while i < bytes.len() {
        if matches!(bytes[i], b'x' | b'y') {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if let Ok(v) = text[start..end].parse::<usize>() {
                best = best.max(v);
            }
            i = end;
        } else {
            i += 1;
        }
    }
    best
}

#[derive(Serialize)]
struct EvalDoc<'a> {
    p: u32,
    k: usize,
    expression: &'a str,
    result: String,
    degree: Option<String>,
}

fn degree_text(e: &Element) -> Option<String> {
    match e.degree() {
        Ok(Degree::Homogeneous(d)) => Some(d.to_string()),
        Ok(Degree::Mixed) => Some("mixed".into()),
        Err(_) => None,
    }
}

fn cmd_eval(cfg: &RunConfig, expression: &str, engine: Engine, out: &mut dyn Write) -> CmdResult {
    let p = cfg.prime()?;
    let (ops, element_text) = split_expression(expression)?;
    let composite = match ops {
        Some(text) => Composite::parse(text)?,
        None => Composite(Vec::new()),
    };
    let k = cfg.k.unwrap_or_else(|| max_generator_index(element_text));
    let ctx = cfg.context(p, k)?;
    for op in &composite.0 {
        if let SteenrodOp::Q(n) = op {
            if *n > ctx.recursion_cap() {
                return Err(Error::RecursionCap {
                    n: *n,
                    cap: ctx.recursion_cap(),
                }
                .into());
            }
        }
    }
    let e = parse(element_text, &ctx)?;
    let result = composite.apply(&e, engine)?;
    match cfg.format {
        Format::Text => {
            writeln!(out, "{result}")?;
            match degree_text(&result) {
                Some(d) => writeln!(out, "degree: {d}")?,
                None => writeln!(out, "degree: none")?,
            }
        }
        Format::Json => {
            let doc = EvalDoc {
                p,
                k,
                expression,
                result: result.to_string(),
                degree: degree_text(&result),
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializes")
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(
    cfg: &RunConfig,
    samples: usize,
    sign_rule: SignRule,
    out: &mut dyn Write,
) -> CmdResult {
    let primes = match cfg.p {
        Some(p) => vec![p],
        None => vec![2, 3, 5],
    };
    for &p in &primes {
        Context::new(p, 1)?;
    }
    let levels: Vec<u32> = match cfg.n {
        Some(n) => vec![n],
        None => (0..=cfg.n_max.unwrap_or(2)).collect(),
    };
    for &p in &primes {
        let cap = cfg.recursion_cap_for(p);
        if let Some(&n) = levels.iter().find(|&&n| n > cap) {
            return Err(Error::RecursionCap { n, cap }.into());
        }
    }
    let grid = Grid {
        primes,
        levels,
        m: cfg.m,
        k: cfg.k,
        exp_cap: cfg.exp_cap,
        recursion_cap: cfg.recursion_cap,
        sign_rule,
        samples,
        seed: cfg.seed,
    };
    let report = run_grid(&grid)?;
    match cfg.format {
        Format::Text => out.write_all(report.render_text().as_bytes())?,
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).expect("serializes")
        )?,
    }
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn render_certificate_text(cert: &Certificate) -> String {
    let doc = cert.to_doc();
    let value = serde_json::to_value(&doc).expect("serializes");
    let mut text = String::new();
    // Field order of the document, not the map's key order.
    for key in [
        "schema",
        "p",
        "n",
        "k",
        "m",
        "source_class",
        "witness",
        "source_degree",
        "bp_degree",
        "witness_degree",
        "wilson_bound",
        "variety_dimension",
        "statement",
    ] {
        let v = &value[key];
        let shown = v
            .as_str()
            .map(str::to_string)
            .unwrap_or_else(|| v.to_string());
        text.push_str(&format!("{key}: {shown}\n"));
    }
    text
}

fn cmd_certify(
    cfg: &RunConfig,
    all_n: bool,
    output: Option<&PathBuf>,
    out: &mut dyn Write,
) -> CmdResult {
    let p = cfg.prime()?;
    let levels: Vec<u32> = if all_n {
        (0..=cfg.n_max.or(cfg.n).unwrap_or(2)).collect()
    } else {
        vec![cfg.n.unwrap_or(0)]
    };
    let base = cfg.context(p, 1)?;
    let mut certs = Vec::new();
    let mut absent = Vec::new();
    for &n in &levels {
        match cfg.m {
            None => certs.push(minimal_example_in(&base, n)?),
            Some(m) => {
                let ctx = base.with_k(cfg.k.unwrap_or(m).max(m))?;
                let x = Element::x_product(&ctx, m)?;
                match detect_nonliftable(n, &x)? {
                    Some(c) => certs.push(c),
                    None => absent.push((n, x)),
                }
            }
        }
    }
    for c in &certs {
        c.verify()?;
    }

    let mut doc = String::new();
    match cfg.format {
        Format::Text => {
            for (i, c) in certs.iter().enumerate() {
                if i > 0 {
                    doc.push('\n');
                }
                doc.push_str(&render_certificate_text(c));
            }
            for (n, x) in &absent {
                doc.push_str(&format!(
                    "absent: Q_{}...Q_0({x}) = 0 at p = {p}, n = {n}\n",
                    n + 1
                ));
            }
        }
        Format::Json => {
            let docs: Vec<_> = certs.iter().map(Certificate::to_doc).collect();
            let body = if all_n || !absent.is_empty() {
                serde_json::to_string_pretty(&docs)
            } else {
                serde_json::to_string_pretty(&docs[0])
            };
            doc.push_str(&body.expect("serializes"));
            doc.push('\n');
        }
    }
    match output {
        Some(path) => std::fs::write(path, doc)?,
        None => out.write_all(doc.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn cmd_table(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let p = cfg.prime()?;
    let n_max = cfg.n_max.or(cfg.n).unwrap_or(2);
    let cap = cfg.recursion_cap_for(p);
    if n_max > cap {
        return Err(Error::RecursionCap { n: n_max, cap }.into());
    }
    let rows = tower_degree_table(p, n_max);
    match cfg.format {
        Format::Text => out.write_all(render_table(p, &rows).as_bytes())?,
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&rows).expect("serializes")
        )?,
    }
    Ok(EXIT_OK)
}

fn render_table(p: u32, rows: &[TowerRow]) -> String {
    let header = [
        "n",
        "q_degree",
        "v_shift",
        "w",
        "wilson_bound",
        "bp_degree",
        "variety_dimension",
    ];
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                r.n.to_string(),
                r.q_degree.to_string(),
                r.v_shift.to_string(),
                r.w.to_string(),
                r.wilson_bound.to_string(),
                r.bp_degree.to_string(),
                r.variety_dimension.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..7)
        .map(|i| {
            cells
                .iter()
                .map(|c| c[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut text = format!("# p = {p}\n");
    let line = |fields: Vec<&str>| -> String {
        let padded: Vec<String> = fields
            .iter()
            .zip(&widths)
            .map(|(f, w)| format!("{f:>w$}"))
            .collect();
        padded.join("  ") + "\n"
    };
    text.push_str(&line(header.to_vec()));
    for c in &cells {
        text.push_str(&line(c.iter().map(String::as_str).collect()));
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["bptower"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn split_expressions() {
        assert_eq!(
            split_expression("Q1*Q0(x1*x2)").unwrap(),
            (Some("Q1*Q0"), "x1*x2")
        );
        assert_eq!(split_expression(" x1 ").unwrap(), (None, "x1"));
        assert!(split_expression("Q1(x1").is_err());
    }

    #[test]
    fn generator_index_scan() {
        assert_eq!(max_generator_index("x1*y12 + x3"), 12);
        assert_eq!(max_generator_index("1"), 1);
    }

    #[test]
    fn exit_codes_for_errors() {
        assert_eq!(exit_code(&Error::RecursionCap { n: 9, cap: 3 }), EXIT_CAP);
        assert_eq!(
            exit_code(&Error::ExponentCap {
                exponent: 9,
                cap: 3
            }),
            EXIT_CAP
        );
        assert_eq!(exit_code(&Error::Assertion("x".into())), EXIT_INTERNAL);
        assert_eq!(exit_code(&Error::NotPrime(9)), EXIT_PARSE);
    }

    #[test]
    fn bare_element_eval() {
        let (code, out, _) = run_args(&["--p", "3", "eval", "x2*x1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "2*x1*x2\ndegree: 2\n");
    }

    #[test]
    fn mixed_and_zero_degrees() {
        let (_, out, _) = run_args(&["--p", "3", "--k", "1", "eval", "x1 + y1"]);
        assert_eq!(out, "y1 + x1\ndegree: mixed\n");
        let (_, out, _) = run_args(&["--p", "3", "--k", "1", "eval", "b(y1)"]);
        assert_eq!(out, "0\ndegree: none\n");
    }

    #[test]
    fn table_text_layout() {
        let (code, out, _) = run_args(&["table", "--p", "3", "--n-max", "0"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "# p = 3");
        assert_eq!(lines.len(), 3);
        let fields: Vec<&str> = lines[2].split_whitespace().collect();
        assert_eq!(fields, vec!["0", "1", "0", "1", "2", "4", "9"]);
    }
}
