//! `rigidspec`: spectrum scans, rigidity experiments and property suites for
//! block-diagonal weighted-shift operators.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod output;
mod rigidity;
mod spectrum;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Process exit statuses.
pub mod status {
    pub const OK: u8 = 0;
    pub const VERIFICATION_FAILED: u8 = 1;
    pub const CONFIG_ERROR: u8 = 2;
    pub const INTERNAL_ERROR: u8 = 3;
}

/// An error carrying the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub status: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            status: status::CONFIG_ERROR,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            status: status::INTERNAL_ERROR,
            message: message.into(),
        }
    }
}

impl From<rigidspec_core::Error> for Failure {
    fn from(e: rigidspec_core::Error) -> Self {
        use rigidspec_core::Error as E;
        match e {
            E::InvalidR(_)
            | E::InvalidGrid(_)
            | E::EmptyGrid
            | E::InvalidArgument(_)
            | E::InvalidParams(_)
            | E::HypothesisViolated(_)
            | E::DimensionGuard { .. } => Failure::config(e.to_string()),
            other => Failure::internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::internal(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(status::CONFIG_ERROR);
        }
    }
    let result = match &cli.command {
        Command::Spectrum(a) => spectrum::run(a),
        Command::Rigidity(a) => rigidity::run(a),
        Command::Verify(a) => verify::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
