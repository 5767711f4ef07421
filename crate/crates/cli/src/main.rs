mod commands;
mod demo;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use veriobs_core::{Mode, ModelKind};

#[derive(Debug, Parser)]
#[command(
    name = "veriobs",
    version,
    about = "Evaluate, identify and audit verification and obfuscation preferences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    /// Comparison tolerance for scenario inputs.
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tolerance: Option<f64>,

    /// Beliefs file used for expected-utility welfare (defaults to the scenario beliefs).
    #[arg(long, global = true, value_name = "FILE")]
    pub true_beliefs: Option<PathBuf>,

    /// Family file with a richer verifiable family.
    #[arg(long, global = true, value_name = "FILE")]
    pub richer: Option<PathBuf>,

    /// Grid step for axiom checks and witness searches.
    #[arg(long, global = true, value_name = "STEP")]
    pub grid: Option<f64>,

    /// Seed for randomised checks; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Override the scenario's model: verification, obfuscation or expected_utility.
    #[arg(long, global = true, value_name = "MODEL")]
    pub model: Option<ModelKind>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Value, expected utility and certainty equivalent of every act.
    Eval { scenario: PathBuf },
    /// Recover the verifiable core, union closure and beliefs from a capacity or scenario.
    Identify { input: PathBuf },
    /// Run the axiom checkers on a scenario or capacity.
    Axioms {
        input: PathBuf,
        /// For capacity inputs: `min` checks the verification axioms, `max` the obfuscation ones.
        #[arg(long, default_value = "min")]
        mode: Mode,
    },
    /// Welfare loss, transparency loss and witness searches.
    Welfare {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        search: Option<Search>,
        /// Comma-separated act names; defaults to every act.
        #[arg(long, value_delimiter = ',')]
        menu: Vec<String>,
    },
    /// Compare the verifiability of two preferences, and risk attitudes for two scenarios.
    Compare { first: PathBuf, second: PathBuf },
    /// Walk through the bundled carbon-reduction example and check each claim.
    Demo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Search {
    Indeterminacy,
    VoLoss,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&outcome.report).expect("reports serialise") + "\n"
            } else {
                render::text(&outcome.report)
            };
            // A closed pipe downstream is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::from(outcome.code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}
