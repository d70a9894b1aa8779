//! `nbwht`: operation-count tables, figure data and consistency checks for
//! sparse Walsh-Hadamard transforms of truncated messages.
//!
//! Exit status: 0 on success, 1 when a validation check fails, 2 on usage
//! errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;
use crate::report::Format;

#[derive(Parser, Debug)]
#[command(name = "nbwht", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact expected counts for q=2 and the q=4 expansion, as fractions.
    Table1,
    /// Approximate and exact expected counts for q=64.
    Table2,
    /// Approximate additions relative to q log2 q for q = 2^4 .. 2^16.
    Fig3 {
        #[arg(long = "q-prime", default_value_t = 12)]
        q_prime: usize,
    },
    /// Operation count of one non-zero pattern.
    Count {
        #[arg(long)]
        q: usize,
        /// Hexadecimal mask, least significant bit = symbol 0.
        #[arg(long)]
        mask: String,
    },
    /// Check exact expectations by enumeration or sampling.
    Validate {
        #[arg(long)]
        q: usize,
        #[arg(long = "q-prime")]
        q_prime: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check the transform-domain convolution against the direct one.
    ConvCheck {
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare check-node convolution cost models.
    Cost {
        #[arg(long)]
        q: usize,
        #[arg(long = "q-prime")]
        q_prime: usize,
        #[arg(long = "dc", default_value_t = 1)]
        d_c: usize,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(cli: &Cli) -> nbwht::Result<Outcome> {
    match &cli.command {
        Command::Table1 => commands::table1(),
        Command::Table2 => commands::table2(),
        Command::Fig3 { q_prime } => commands::fig3(*q_prime, 16, 1 << 16),
        Command::Count { q, mask } => commands::count(*q, mask),
        Command::Validate { q, q_prime, run } => {
            commands::validate(*q, *q_prime, run.trials, run.seed)
        }
        Command::ConvCheck { q, run } => commands::conv_check(*q, run.trials, run.seed),
        Command::Cost { q, q_prime, d_c } => commands::cost(*q, *q_prime, *d_c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = outcome.report.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("validation failed");
        ExitCode::from(1)
    }
}
