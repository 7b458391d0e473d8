//! `ir2`: command-line front end for the integrated R² toolkit.
//!
//! Results go to standard output as JSON; errors go to standard error as a
//! one-line JSON object. Exit codes: 0 success, 2 usage, 3 data, 4 numerical.

mod args;
mod commands;
mod data;
mod error;

use std::hash::{BuildHasher, Hash, Hasher};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn entropy_seed() -> u64 {
    let state = std::collections::hash_map::RandomState::new();
    let mut h = state.build_hasher();
    std::time::SystemTime::now().hash(&mut h);
    std::process::id().hash(&mut h);
    h.finish()
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let seed = if cli.entropy_seed {
        entropy_seed()
    } else {
        cli.seed
    };
    match &cli.command {
        Command::Coeff(a) => commands::coeff(a, seed),
        Command::Ford(a) => commands::ford(a, seed),
        Command::Test(a) => commands::test(a, seed),
        Command::Permdist(a) => commands::permdist(a),
        Command::Simulate(a) => commands::simulate(a, seed),
        Command::Sample(a) => commands::sample(a, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
