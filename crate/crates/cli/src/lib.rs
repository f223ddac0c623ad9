//! Batch front end for monogenic-signal edge detection: image I/O, the
//! `detect`, `compare`, `sweep`, `verify` and `fixture` commands, and the run
//! manifest.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;

use monogenic_core::edgeops::Method;
use monogenic_core::verify::CheckParams;

use crate::args::{Cli, Command};
pub use crate::error::{CliError, Result};

/// Executes a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let summary = match cli.command {
        Command::Detect { inputs, method, detector, output, raw } => {
            commands::cmd_detect(&inputs, &detector.config(method), &output, raw)?
        }
        Command::Compare { input, method, detector, output } => {
            let methods: Vec<Method> =
                method.into_iter().flat_map(|m| m.map_or(Method::ALL.to_vec(), |m| vec![m])).collect();
            commands::cmd_compare(&input, &methods, &detector, &output)?
        }
        Command::Sweep { input, scales, method, detector, output } => {
            commands::cmd_sweep(&input, &scales, method, &detector, &output)?
        }
        Command::Verify { suite, fd_step, mask_eps, out_dir, timings } => {
            let params = CheckParams { delta: fd_step, eps: mask_eps, ..CheckParams::default() };
            let outcome = commands::cmd_verify(&suite, &params, &out_dir, timings)?;
            print_lines(&outcome.summary.lines);
            let failed = outcome.failures();
            if failed > 0 {
                return Err(CliError::VerificationFailed { failed, total: outcome.reports.len() });
            }
            return Ok(());
        }
        Command::Fixture { name, output, width, height, seed } => {
            commands::cmd_fixture(name, width, height, seed, &output)?;
            return Ok(());
        }
    };
    print_lines(&summary.lines);
    Ok(())
}

fn print_lines(lines: &[String]) {
    for line in lines {
        println!("{line}");
    }
}
