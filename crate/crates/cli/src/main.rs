mod args;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Why a run did not produce a report.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable input or an unmet precondition.
    Usage(String),
    /// A search or memory budget ran out.
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

/// A finished report and whether it carries a failing verdict.
pub struct Outcome {
    pub body: Vec<u8>,
    pub failed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("lacuna: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run::dispatch(&cli.command) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &outcome.body),
                None => std::io::stdout().write_all(&outcome.body),
            };
            if let Err(e) = written {
                eprintln!("lacuna: cannot write report: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.failed as u8)
        }
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("lacuna: {m}"),
                Failure::Budget(m) => eprintln!("lacuna: budget exhausted: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
