mod builtin;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Verification harness and evaluator for the supercontact kernel.
#[derive(Parser, Debug)]
#[command(name = "supercontact", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification suites and report per-check results.
    Verify(VerifyArgs),
    /// Evaluate an invariant, cocycle or germ quantity from input files.
    Eval(EvalArgs),
    /// Compare both sides of a Cartan expansion for one (Φ, X, t₁).
    Cartan(CartanArgs),
    /// Summarize a structured report written by `verify --out`.
    Report(ReportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Rational,
    F64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// algebra, invariants, osp, cocycles, cartan or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Restrict to checks on S^{1|N}.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value = "rational")]
    pub field: Backend,
    #[arg(long = "jet-order", default_value_t = 6)]
    pub jet_order: i32,
    /// Tolerance in f64 mode; ignored for rationals.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override every check's trial count.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Only run checks whose id starts with this prefix (repeatable).
    #[arg(long)]
    pub only: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Also write the structured report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalWhat {
    Euclid,
    Affine,
    CrossRatio,
    OddProj,
    Cocycle,
    Germ,
    Matrix,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    #[value(name = "E", alias = "e")]
    E,
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "S", alias = "s")]
    S,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    pub what: EvalWhat,
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Cocycle to evaluate with `eval cocycle`.
    #[arg(long, value_enum)]
    pub which: Option<Which>,
    /// Expected odd dimension of the input.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value = "rational")]
    pub field: Backend,
    /// Jet order of germs built from matrices.
    #[arg(long = "jet-order", default_value_t = 6)]
    pub jet_order: i32,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CartanArgs {
    #[arg(long)]
    pub n: usize,
    /// Germ file; a seeded random germ when absent.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Vector field: a file, `builtin:dx`, `builtin:euler` or `builtin:f=POLY`.
    #[arg(long)]
    pub field: Option<String>,
    /// File with the base point t₁; the soul-free base point when absent.
    #[arg(long)]
    pub point: Option<PathBuf>,
    /// Which expansion to compare.
    #[arg(long, value_enum, default_value = "projective")]
    pub kind: CartanKind,
    #[arg(long, value_enum, default_value = "rational")]
    pub backend: Backend,
    #[arg(long = "jet-order", default_value_t = 6)]
    pub jet_order: i32,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CartanKind {
    Euclid,
    Affine,
    Projective,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Report written by `verify --out`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// Outcome of a command, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// A check ran and did not hold.
    Check(String),
    /// Bad flags, unreadable files or invalid input.
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    let out = match cli.command {
        Command::Verify(a) => commands::verify(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Cartan(a) => commands::cartan(&a),
        Command::Report(a) => commands::report(&a),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Check(text) => print!("{text}"),
                Failure::Input(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(code)
        }
    }
}
