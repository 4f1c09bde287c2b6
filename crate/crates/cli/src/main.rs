use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod commands;
mod manifest;

use commands::Command;

/// Empirical Bayes inference for sparse normal means.
#[derive(Debug, Parser)]
#[command(name = "sparse-eb", version, about)]
struct Cli {
    /// Worker threads for replication-level parallelism (default: all cores).
    #[arg(long, global = true, env = "SPARSE_EB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<sparse_eb::Error>() {
            return match e {
                sparse_eb::Error::Numeric(_) => EXIT_NUMERIC,
                _ => EXIT_DATA,
            };
        }
    }
    EXIT_DATA
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match commands::dispatch(cli.command, cli.threads, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
