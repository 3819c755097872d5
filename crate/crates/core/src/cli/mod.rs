//! Command-line front end.
//!
//! Every command reads at most one [`Document`] from stdin and writes one
//! document to stdout: a report, or with `--raw` the first output alone.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 malformed input or
//! usage, 3 a precondition of the computation failed.

mod commands;
pub mod document;
pub mod selftest;

use std::io::{Read, Write};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::context::Context;
use crate::error::DrwError;
pub use commands::run_command;
pub use document::{Document, Payload, Property, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Semantic { path: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(DrwError),
}

impl From<DrwError> for CliError {
    fn from(e: DrwError) -> Self {
        match e {
            DrwError::NotIntegral(_) => CliError::Semantic { path: "$".into(), message: e.to_string() },
            e => CliError::Core(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(_) => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "syntax",
            CliError::Semantic { .. } => "semantic",
            CliError::Usage(_) => "usage",
            CliError::Core(_) => "precondition",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "drw", version, about = "Exact de Rham-Witt computations over F_p[x_1, ..., x_n]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Prime (commands without input).
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Number of variables.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Truncation level.
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Largest denominator exponent of a weight.
    #[arg(long, global = true)]
    pub umax: Option<u32>,
    /// Bound on the total weight.
    #[arg(long, global = true)]
    pub dmax: Option<u64>,
    /// Rational in ]0, 1], e.g. 1/8.
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub cases: Option<u64>,
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Number of factors minus one in `rng`.
    #[arg(long, global = true)]
    pub t: Option<usize>,
    /// Frobenius lift for `tf` and `gen`.
    #[arg(long, global = true, value_enum, default_value_t = Lift::Canonical)]
    pub lift: Lift,
    /// Record wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Print the first output as a bare document instead of the report.
    #[arg(long, global = true)]
    pub raw: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lift {
    /// `x_i -> x_i^p`
    Canonical,
    /// `x_i -> x_i^p + p x_i`
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Form,
    Integrable,
    FrobeniusStructured,
    Basechange,
    Idempotent,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sum of a list of forms.
    Add,
    /// Ordered product of a list of forms.
    Mul,
    /// Differential.
    D,
    /// Frobenius.
    #[command(name = "F")]
    F,
    /// Verschiebung.
    #[command(name = "V")]
    V,
    /// Whether the form lies in the integral lattice.
    Integral,
    /// Largest `s` with the form in `p^s W_m Ω`.
    Vp,
    /// Reduction modulo `Fil^m`.
    Truncate,
    /// Teichmüller representative of a polynomial.
    Teich,
    /// Ghost components `w_0, ..., w_{m-1}`.
    Ghost,
    /// Image of a classical form under `t_F`.
    Tf,
    /// Splitting into int, frp and d(frp) parts.
    Decompose,
    /// Inverse of `d` on d(frp).
    Dinv,
    /// `ζ_ε` and its three summands.
    Zeta,
    /// Largest grid `ε` satisfying the overconvergence bounds.
    Delta,
    /// `N N + dN`.
    Curvature,
    /// `U^{-1} N U + U^{-1} dU` from matrices `[N, U]`.
    Basechange,
    /// `N u + du` from matrices `[N, u]`.
    Evaluate,
    /// Connection along a projector from matrices `[A, P]`.
    Lift,
    /// `p F(N)`.
    Pullback,
    /// Whether `G` is horizontal from matrices `[E, F, G]`.
    Horizontal,
    /// One normalization step.
    Step,
    /// Full normalization.
    Normalize,
    /// Overconvergence condition at `--epsilon`.
    Occheck,
    /// Product expansion in rngs of the form `pZ/p^mZ`.
    Rng,
    /// Seeded instance.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
    },
    /// All invariant suites.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Add => "add",
            Command::Mul => "mul",
            Command::D => "d",
            Command::F => "F",
            Command::V => "V",
            Command::Integral => "integral",
            Command::Vp => "vp",
            Command::Truncate => "truncate",
            Command::Teich => "teich",
            Command::Ghost => "ghost",
            Command::Tf => "tf",
            Command::Decompose => "decompose",
            Command::Dinv => "dinv",
            Command::Zeta => "zeta",
            Command::Delta => "delta",
            Command::Curvature => "curvature",
            Command::Basechange => "basechange",
            Command::Evaluate => "evaluate",
            Command::Lift => "lift",
            Command::Pullback => "pullback",
            Command::Horizontal => "horizontal",
            Command::Step => "step",
            Command::Normalize => "normalize",
            Command::Occheck => "occheck",
            Command::Rng => "rng",
            Command::Gen { .. } => "gen",
            Command::Selftest => "selftest",
        }
    }

    pub fn reads_input(&self) -> bool {
        !matches!(self, Command::Rng | Command::Gen { .. } | Command::Selftest)
    }
}

impl Options {
    /// Context from the flags, with defaults `p = 3, n = 1, m = 3`.
    pub fn context(&self) -> Result<Context, CliError> {
        let m = self.m.unwrap_or(3);
        Context::with_caps(self.p.unwrap_or(3), self.n.unwrap_or(1), m, self.umax.unwrap_or(m + 2), self.dmax)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Runs one invocation; returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok(doc) => {
            let _ = writeln!(stdout, "{}", doc.to_text());
            match &doc.payload {
                Payload::Report(r) if !r.passed() => 1,
                _ => 0,
            }
        }
        Err(e) => {
            let msg = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            let _ = writeln!(stderr, "{msg}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Document, CliError> {
    let start = Instant::now();
    let (input, digest) = if cli.command.reads_input() {
        let mut text = String::new();
        stdin.read_to_string(&mut text).map_err(|e| CliError::Usage(format!("reading stdin: {e}")))?;
        let doc = Document::parse(&text)?;
        let digest = sha256_hex(doc.to_text().as_bytes());
        (Some(doc), digest)
    } else {
        let line = format!("{} {:?}", cli.command.name(), cli.opts);
        (None, sha256_hex(line.as_bytes()))
    };
    let ctx = match &input {
        Some(doc) => doc.ctx,
        None => cli.opts.context()?,
    };
    let mut report = run_command(&cli.command, &cli.opts, &ctx, input.as_ref())?;
    report.command = cli.command.name().to_string();
    report.digest = digest;
    if cli.opts.timing {
        report.wall_ms = Some(start.elapsed().as_millis() as u64);
    }
    if cli.opts.raw {
        let (_, first) = report
            .outputs
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Usage(format!("{} has no output to print raw", cli.command.name())))?;
        return Ok(Document::new(ctx, first));
    }
    Ok(Document::new(ctx, Payload::Report(report)))
}
