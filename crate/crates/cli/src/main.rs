//! `golay-dfcw`: generate codes, chips and code sets, run the receiver and
//! the Monte Carlo experiments, and write CSV plus gnuplot scripts.

mod args;
mod commands;
mod config;
mod output;

use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;

fn one_line(msg: &str) -> String {
    msg.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("; ")
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {}", one_line(msg.trim_start_matches("error: ")));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv = match config::expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => return fail(2, &format!("{e:#}")),
    };
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                return fail(2, "a subcommand is required (see --help)");
            }
            _ => {
                let text = e.render().to_string();
                let first = text.lines().next().unwrap_or("invalid arguments");
                return fail(2, first);
            }
        },
    };
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(1, &format!("{e:#}")),
    }
}
