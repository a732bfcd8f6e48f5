//! `poly`: normalization, translation, termination certificates, critical
//! pairs and semantic oracles from the command line.

mod commands;
mod load;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit statuses shared by every subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Error = 1,
    FuelExhausted = 2,
    NotCertified = 3,
}

#[derive(Parser, Debug)]
#[command(
    name = "poly",
    version,
    about = "Rewriting on circuits with explicit resource management"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rewrite a circuit until no rule applies.
    Normalize {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long)]
        circuit: String,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
        strategy: StrategyArg,
        /// Seed for `--strategy random`.
        #[arg(long, required_if_eq("strategy", "random"))]
        seed: Option<u64>,
    },
    /// Print the translated polygraph of a term rewriting system.
    Translate {
        /// A `.trs` file or preset name.
        #[arg(long)]
        trs: String,
    },
    /// Certify termination with a stack of interpretations.
    CheckTerm {
        #[command(flatten)]
        theory: TheoryArgs,
        /// `f1`, `g`, `lz2` or an interpretation file; repeat for layers.
        /// Defaults to the preset's own layers.
        #[arg(long)]
        interp: Vec<String>,
    },
    /// Enumerate critical pairs and try to join them.
    Cps {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long, default_value_t = 8)]
        max_nodes: usize,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
    },
    /// Evaluate a circuit in the term, finite-set and linear semantics.
    Semantics {
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long)]
        circuit: String,
    },
    /// Run the full check battery on a bundled preset.
    VerifyPreset {
        name: String,
        #[arg(long, default_value_t = 6)]
        max_nodes: usize,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct TheoryArgs {
    /// A `.poly` file or preset name (e.g. `rds`, `lz2`).
    #[arg(long, conflicts_with = "trs")]
    pub theory: Option<String>,
    /// A `.trs` file or preset name, used through its translation.
    #[arg(long)]
    pub trs: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Leftmost,
    Random,
    All,
}

fn main() -> ExitCode {
    // clap's own usage-error status (2) would read as "fuel exhausted".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Status::Error as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let json = cli.json;
    let result = match cli.command {
        Command::Normalize {
            theory,
            circuit,
            fuel,
            strategy,
            seed,
        } => {
            let strategy = match strategy {
                StrategyArg::Leftmost => poly_core::Strategy::Leftmost,
                StrategyArg::All => poly_core::Strategy::All,
                StrategyArg::Random => {
                    poly_core::Strategy::Random(seed.expect("clap requires a seed"))
                }
            };
            commands::normalize(&theory, &circuit, fuel as usize, strategy, json)
        }
        Command::Translate { trs } => commands::translate(&trs, json),
        Command::CheckTerm { theory, interp } => commands::check_term(&theory, &interp, json),
        Command::Cps {
            theory,
            max_nodes,
            fuel,
        } => commands::cps(&theory, max_nodes, fuel as usize, json),
        Command::Semantics { theory, circuit } => commands::semantics(&theory, &circuit, json),
        Command::VerifyPreset {
            name,
            max_nodes,
            fuel,
            seed,
        } => commands::verify_preset(&name, max_nodes, fuel as usize, seed, json),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Status::Error as u8)
        }
    }
}
