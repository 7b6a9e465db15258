//! Command-line front end for `gfdiv`.
//!
//! [`run`] takes an argument vector and returns the exit code and the text
//! destined for stdout and stderr, so tests can drive it in-process.

pub mod cli;
pub mod commands;
pub mod config;
pub mod input;
pub mod output;

use clap::{CommandFactory, FromArgMatches};
use serde_json::json;

pub use cli::Cli;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(kind: &str, message: &str) -> Self {
        let msg = message.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ");
        let line = json!({"error": kind, "message": msg}).to_string();
        Outcome { code: 1, stdout: String::new(), stderr: line + "\n" }
    }
}

/// Caps the global rayon pool at `GFDIV_THREADS` threads. Only the first
/// call in a process has an effect.
pub fn init_threads() {
    if let Some(n) = std::env::var("GFDIV_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
        }
    }
}

fn parse(argv: Vec<String>) -> Result<Cli, clap::Error> {
    let cmd = Cli::command().mut_subcommands(|s| s.args_override_self(true));
    let matches = cmd.try_get_matches_from(argv)?;
    Cli::from_arg_matches(&matches)
}

pub fn run(argv: Vec<String>) -> Outcome {
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => return Outcome::error(e.kind(), &e.to_string()),
    };
    let cli = match parse(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let text = e.render().to_string();
            return match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome::error("usage", &text),
            };
        }
    };
    let rendered = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => return Outcome::error(e.kind(), &e.to_string()),
    };
    let code = if cli.global.strict && rendered.failed { 2 } else { 0 };
    match &cli.global.output {
        Some(path) => match std::fs::write(path, &rendered.text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome::error("io", &format!("{}: {e}", path.display())),
        },
        None => Outcome { code, stdout: rendered.text, stderr: String::new() },
    }
}
