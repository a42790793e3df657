//! Command-line front end: verification suites, parameter sweeps and the
//! factor audit, all emitting CSV reports.

pub mod args;
pub mod commands;
pub mod context;
pub mod error;
pub mod grid;
pub mod pool;
pub mod report;

use std::path::PathBuf;

use clap::Parser;
use serde::Serialize;

use crate::args::{merge_config, Cli, Command};
use crate::commands::Outcome;
use crate::error::CliResult;
use crate::report::Report;

/// The command line as recorded in report headers, without the output path.
pub fn recorded_command_line(argv: &[String]) -> String {
    let mut out = vec!["cqfi".to_string()];
    let mut skip = false;
    for a in argv.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") {
            continue;
        }
        out.push(a.clone());
    }
    out.join(" ")
}

/// Resolved options as compact JSON, without the output path.
fn resolved<T: Serialize>(args: &T) -> String {
    let mut v = serde_json::to_value(args).expect("serializable");
    if let Some(map) = v.as_object_mut() {
        map.remove("out");
        map.retain(|_, v| !v.is_null());
    }
    v.to_string()
}

fn header(report: &mut Report, argv: &[String], seed: Option<u64>, config: String) {
    let own = std::mem::take(&mut report.meta);
    context::stamp(report, &recorded_command_line(argv), seed, &config);
    report.meta.extend(own);
}

macro_rules! with_config {
    ($args:expr) => {{
        let mut merged = merge_config($args, $args.common.config.as_deref())?;
        merged.model = $args.model.clone();
        merged.common.config = $args.common.config.clone();
        merged
    }};
}

fn dispatch(cli: Cli, argv: &[String]) -> CliResult<(Outcome, Option<PathBuf>)> {
    let (mut outcome, out, seed, config) = match &cli.command {
        Command::Verify(a) => {
            let a = with_config!(a);
            (commands::verify::run(&a)?, a.common.out.clone(), a.common.seed, resolved(&a))
        }
        Command::Charop(a) => {
            let a = with_config!(a);
            (commands::charop::run(&a)?, a.common.out.clone(), a.common.seed, resolved(&a))
        }
        Command::Qfi(a) => {
            let a = with_config!(a);
            (commands::qfi::run(&a)?, a.common.out.clone(), a.common.seed, resolved(&a))
        }
        Command::Qfim(a) => {
            let a = with_config!(a);
            (commands::qfi::run_matrix(&a)?, a.common.out.clone(), a.common.seed, resolved(&a))
        }
        Command::Thermal(a) => {
            let a = with_config!(a);
            (commands::thermal::run(&a)?, a.common.out.clone(), a.common.seed, resolved(&a))
        }
        Command::Altqfi(a) => {
            let a = with_config!(a);
            (commands::altqfi::run(&a)?, a.common.out.clone(), a.common.seed, resolved(&a))
        }
        Command::Sweep(a) => {
            let a = with_config!(a);
            (commands::sweep::run(&a)?, a.common.out.clone(), a.common.seed, resolved(&a))
        }
        Command::Audit(a) => {
            let mut merged = merge_config(a, a.config.as_deref())?;
            merged.config = a.config.clone();
            (commands::audit::run(&merged)?, merged.out.clone(), None, resolved(&merged))
        }
    };
    header(&mut outcome.report, argv, seed, config);
    Ok((outcome, out))
}

/// Runs the command line `argv` (program name first) and returns the exit
/// status: 0 when every check passes, 1 on check failure, 2 on usage errors.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (outcome, out) = match dispatch(cli, argv) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cqfi: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = outcome.report.write(out.as_deref()) {
        eprintln!("cqfi: {e}");
        return e.exit_code();
    }
    eprintln!("{}", outcome.summary);
    if outcome.pass {
        0
    } else {
        1
    }
}
