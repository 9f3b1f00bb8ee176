mod args;
mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use crate::args::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hpaqc_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("could not encode output: {0}")]
    Encode(serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "parse",
            CliError::Encode(_) => "encode",
            CliError::Invalid(_) => "invalid_input",
            CliError::Usage(_) => "usage",
        }
    }
}

fn fail(err: &CliError) -> ExitCode {
    let body = serde_json::json!({ "error": err.kind(), "message": err.to_string() });
    eprintln!("{body}");
    ExitCode::from(2)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("HPAQC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "HPAQC_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(&CliError::Usage(
                e.kind().to_string() + ": " + e.render().to_string().trim(),
            ))
        }
    };
    if let Err(e) = configure_threads() {
        return fail(&e);
    }
    let result = match cli.command {
        Command::Build(a) => commands::build(&a),
        Command::Reduce(a) => commands::reduce(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Enumerate(a) => commands::enumerate(&a),
        Command::Count(a) => commands::count(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
