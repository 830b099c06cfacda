#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Process exit status: 0 pass, 2 check failure or usage, 3 numerical
/// failure, 4 exploratory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Fail = 2,
    Numerical = 3,
    Exploratory = 4,
}

fn classify(err: &anyhow::Error) -> Exit {
    use hodge_spectra::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::Factorization { .. } | E::NoConvergence { .. } | E::EigenNoConvergence { .. }) => Exit::Numerical,
        _ => Exit::Fail,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mesh(a) => commands::mesh(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Convergence(a) => commands::convergence(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let code = classify(&e);
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}
