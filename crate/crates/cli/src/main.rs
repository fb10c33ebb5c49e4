//! `causerep`: repairs, causes and repair programs for a problem file.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "causerep",
    version,
    about = "Database repairs, query-answer causes and ASP repair programs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Tuple deletions or null updates.
    #[arg(long, global = true, value_enum, env = "CAUSEREP_SEMANTICS", default_value = "tuple")]
    pub semantics: SemanticsArg,
    #[arg(
        long,
        global = true,
        value_enum,
        env = "CAUSEREP_MINIMALITY",
        default_value = "subset"
    )]
    pub minimality: MinimalityArg,
    /// Treat the file's inclusion dependencies as hard constraints.
    #[arg(long, global = true, env = "CAUSEREP_ICS")]
    pub ics: bool,
    #[arg(long, global = true, value_enum, env = "CAUSEREP_FORMAT", default_value = "text")]
    pub format: Format,
    /// Query to analyse; defaults to the only query of the file.
    #[arg(long, global = true, env = "CAUSEREP_QUERY")]
    pub query: Option<String>,
    /// Comma-separated answer tuple for an open query.
    #[arg(long, global = true, env = "CAUSEREP_ANSWER", allow_hyphen_values = true)]
    pub answer: Option<String>,
    /// Comma-separated tids of exogenous tuples.
    #[arg(long, global = true, env = "CAUSEREP_EXOGENOUS", value_delimiter = ',')]
    pub exogenous: Vec<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the repairs of the instance.
    Repairs(Input),
    /// List actual causes with responsibilities and contingency sets.
    Causes(CausesArgs),
    /// Responsibility of one tuple or position, or the most responsible causes.
    Responsibility(ResponsibilityArgs),
    /// Print the answer-set repair program.
    EmitAsp(EmitArgs),
    /// Compare solver output with the engine's repairs.
    Check(CheckArgs),
    /// Evaluate queries and constraints.
    Eval(Input),
}

#[derive(Args, Debug)]
pub struct Input {
    pub file: PathBuf,
}

#[derive(Args, Debug)]
pub struct CausesArgs {
    pub file: PathBuf,
    #[arg(long, env = "CAUSEREP_MAX_CONTINGENCY_SETS")]
    pub max_contingency_sets: Option<usize>,
    #[arg(long, env = "CAUSEREP_MAX_CONTINGENCY_SIZE")]
    pub max_contingency_size: Option<usize>,
    /// Count several nulled positions of one tuple as a single change.
    #[arg(long, env = "CAUSEREP_COLLAPSE_TUPLES")]
    pub collapse_tuples: bool,
}

#[derive(Args, Debug)]
pub struct ResponsibilityArgs {
    pub file: PathBuf,
    #[arg(long, conflicts_with = "position")]
    pub tid: Option<u64>,
    /// A position such as `R[2;1]` (null semantics only).
    #[arg(long)]
    pub position: Option<String>,
    #[arg(long, env = "CAUSEREP_COLLAPSE_TUPLES")]
    pub collapse_tuples: bool,
}

#[derive(Args, Debug)]
pub struct EmitArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, env = "CAUSEREP_FLAVOR", default_value = "non-disjunctive")]
    pub flavor: FlavorArg,
    /// Program extensions, comma-separated.
    #[arg(long, value_enum, env = "CAUSEREP_INCLUDE", value_delimiter = ',')]
    pub include: Vec<ExtensionArg>,
    #[arg(long, env = "CAUSEREP_MAXINT", default_value_t = 100)]
    pub maxint: u64,
    /// Write the program here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Solver output with one brace-delimited model per answer set.
    #[arg(long, env = "CAUSEREP_MODELS")]
    pub models: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemanticsArg {
    Tuple,
    Null,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinimalityArg {
    Subset,
    Cardinality,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlavorArg {
    Disjunctive,
    NonDisjunctive,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionArg {
    Causes,
    CauCont,
    ContingencySets,
    PreRho,
    WeakConstraints,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Mismatch(out)) => {
            print!("{out}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("causerep: {e}");
            ExitCode::from(e.code())
        }
    }
}
