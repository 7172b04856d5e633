//! `mahler`: orbit dumps, Mahler-measure runs, entropy reports, closed-form
//! constants and cluster-seed experiments.

mod args;
mod commands;
mod failure;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use failure::Failure;

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Internal(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Orbit(a) => commands::orbit(a),
        Command::Mahler(a) => commands::mahler(a),
        Command::Entropy(a) => commands::entropy(a),
        Command::ClosedForm(a) => commands::closed_form(a),
        Command::Cluster(a) => commands::cluster(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { failure::CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mahler: {f}");
            ExitCode::from(f.code())
        }
    }
}
