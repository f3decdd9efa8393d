//! Command line and HTTP front end for `gspecies`.

pub mod commands;
pub mod input;
pub mod server;

use clap::Parser;
use commands::{render, run, Cli, Command};
use std::process::ExitCode;

/// Parses arguments, runs the command and prints the result. Exit codes: 0 success,
/// 1 domain error (error JSON on stderr), 2 usage error.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(args);
    if let Command::Serve { port, host } = &cli.command {
        let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
        return match rt.block_on(server::serve(host, *port)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}", serde_json::json!({"error": "Io", "witness": {"detail": e.to_string()}}));
                ExitCode::from(1)
            }
        };
    }
    match run(&cli) {
        Ok(v) => {
            println!("{}", render(&v, cli.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", render(&e.to_json(), cli.format));
            ExitCode::from(1)
        }
    }
}
