//! Command-line front end. `run` parses arguments, dispatches, and returns
//! the exit code with the full report text.
//!
//! Exit codes: 0 affirmative, 1 negative verdict, 2 usage error, 3 input
//! parse or validation error.

mod commands;

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};

use extprob::Error;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "extprob", version, about = "Exact Popper spaces, LPSs and nonstandard probability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a document against the invariants of its kind.
    Validate(ValidateArgs),
    /// Map between representations; prints the converted document.
    Convert(ConvertArgs),
    /// Decide ≈ or ≃ between two models.
    Compare(CompareArgs),
    /// Expectations of random variables.
    Expect(ExpectArgs),
    /// Independence of events or random variables.
    Indep(IndepArgs),
    /// Check a strong-independence witness against its target.
    VerifyWitness(WitnessArgs),
    /// Belief queries on an event.
    Believe(BelieveArgs),
    /// Drop redundant measures from an LPS.
    Reduce(ReduceArgs),
    /// Built-in reference fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Args, Debug)]
struct ValidateArgs {
    file: String,
    /// Axiom level for Popper documents.
    #[arg(long, value_enum, default_value_t = LevelArg::Popper)]
    level: LevelArg,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    from: Repr,
    #[arg(long, value_enum)]
    to: Repr,
    #[arg(long = "in")]
    input: String,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, value_enum)]
    relation: RelationArg,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    /// Print the certificate as a JSON document instead of a summary.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ExpectArgs {
    #[arg(long)]
    model: String,
    /// Per-atom values, comma separated (`1,-1/2,0`), or `@file.json`.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Second variable; the report then includes the comparison.
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
}

#[derive(Args, Debug)]
struct IndepArgs {
    #[arg(long)]
    model: String,
    #[arg(long, value_enum, default_value_t = IndepKind::Events)]
    kind: IndepKind,
    /// Event mode, for `--kind events`.
    #[arg(long, value_enum, default_value_t = ModeArg::Approx)]
    mode: ModeArg,
    /// Events as comma-separated world labels or atom indices.
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    v: Option<String>,
    /// Conditioning event; defaults to the whole space.
    #[arg(long)]
    given: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Vec<String>,
    /// Weak independence also requires positive mass on the product of ranges.
    #[arg(long)]
    product_range: bool,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long)]
    witness: String,
    #[arg(long)]
    target: String,
}

#[derive(Args, Debug)]
struct BelieveArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    u: String,
    /// One belief kind, or `all` for every kind the model supports.
    #[arg(long, default_value = "all")]
    kind: String,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long = "in")]
    input: String,
}

#[derive(Subcommand, Debug)]
enum FixtureAction {
    List,
    /// Run one fixture, or `all`.
    Run { name: String },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LevelArg {
    Cps,
    Popper,
    Treelike,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Repr {
    Lps,
    Nps,
    Popper,
    Treelike,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum RelationArg {
    Aeq,
    Simeq,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum IndepKind {
    Events,
    Weak,
    Set,
    Mutual,
    Exact,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Approx,
    Popper,
}

/// A failure that ends the command without a verdict.
#[derive(Debug)]
pub(crate) enum Failure {
    Usage(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::KindMismatch(_) => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

pub(crate) type Outcome = Result<(i32, String), Failure>;

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_YES,
                _ => EXIT_USAGE,
            };
            return (code, e.render().to_string());
        }
    };
    let result = match cli.command {
        Command::Validate(a) => commands::validate(&a.file, a.level),
        Command::Convert(a) => commands::convert(&a.input, a.from, a.to),
        Command::Compare(a) => commands::compare(&a.a, &a.b, a.relation, a.json),
        Command::Expect(a) => commands::expect(&a.model, &a.x, a.y.as_deref()),
        Command::Indep(a) => commands::indep(&a),
        Command::VerifyWitness(a) => commands::verify_witness(&a.witness, &a.target),
        Command::Believe(a) => commands::believe(&a.model, &a.u, &a.kind),
        Command::Reduce(a) => commands::reduce(&a.input),
        Command::Fixtures { action: FixtureAction::List } => commands::fixtures_list(),
        Command::Fixtures { action: FixtureAction::Run { name } } => commands::fixtures_run(&name),
    };
    match result {
        Ok((code, mut text)) => {
            if !text.ends_with('\n') {
                text.push('\n');
            }
            (code, text)
        }
        Err(Failure::Usage(m)) => (EXIT_USAGE, format!("error: {m}\n")),
        Err(Failure::Input(m)) => (EXIT_INPUT, format!("error: {m}\n")),
    }
}
