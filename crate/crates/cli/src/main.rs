//! `oag`: quantifier elimination, discrete-set analysis and pattern checks
//! from the command line.

mod commands;
mod corpus;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oag_core::Error;

use commands::Outcome;

#[derive(Parser)]
#[command(name = "oag", version, about = "Decision procedures and analysis tools for ordered Abelian groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Report wall-clock time (json `elapsed` is null otherwise).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args)]
pub struct FormulaInput {
    /// Formula text; omit to read `--file`.
    pub formula: Option<String>,
    #[arg(long)]
    pub file: Option<String>,
    /// doag | pres | t0 | t1 | t | tn:<n>
    #[arg(long, default_value = "doag")]
    pub theory: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the normal form of every term of a formula.
    Normalize {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        common: Common,
    },
    /// Eliminate quantifiers.
    Qe {
        #[command(flatten)]
        input: FormulaInput,
        /// Spot-check the result at this many sampled parameter points
        /// (seeded by OAG_SEED).
        #[arg(long, default_value_t = 0)]
        check: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Decide a sentence.
    Decide {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        common: Common,
    },
    /// Decompose the line into cells for a formula in one variable.
    Cells {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        common: Common,
    },
    /// Analyze a discrete set given as a prefix file or a Presburger formula.
    Analyze(commands::AnalyzeArgs),
    /// Check an inp or ict pattern file.
    Pattern(commands::PatternArgs),
    /// The bundled corpus of worked examples.
    Corpus {
        #[command(subcommand)]
        action: corpus::Action,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. } | Error::Input(_) => 1,
        Error::Signature { .. } => 2,
        Error::PathExplosion { .. } => 4,
        _ => 3,
    }
}

fn emit(result: oag_core::Result<Outcome>, format: Format) -> ExitCode {
    match result {
        Ok(out) => {
            match format {
                Format::Text => println!("{}", out.text.trim_end()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("json")),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            match format {
                Format::Text => eprintln!("error: {e}"),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({ "error": e.to_string(), "code": exit_code(&e) }))
                        .expect("json")
                ),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Normalize { input, common } => emit(commands::normalize(&input, &common), common.format),
        Cmd::Qe { input, check, common } => emit(commands::qe(&input, check, &common), common.format),
        Cmd::Decide { input, common } => emit(commands::decide(&input, &common), common.format),
        Cmd::Cells { input, common } => emit(commands::cells(&input, &common), common.format),
        Cmd::Analyze(args) => {
            let f = args.common.format;
            emit(commands::analyze(&args), f)
        }
        Cmd::Pattern(args) => {
            let f = args.common.format;
            emit(commands::pattern(&args), f)
        }
        Cmd::Corpus { action } => corpus::run(action),
    }
}
