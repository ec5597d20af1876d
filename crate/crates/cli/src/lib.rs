//! Command-line front end: configuration, output formats and subcommands.

pub mod args;
pub mod bench;
pub mod commands;
pub mod config;
pub mod output;

use std::fs;

use clap::Parser;

pub use commands::CliError;

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();

    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: &args::Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => Some(fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?),
        None => None,
    };
    let (command, flags) = cli.command.flags();
    let (cfg, warnings) = config::parse_config(command, &flags, file.as_deref())?;
    for w in warnings {
        log::warn!("{w}");
    }
    commands::run(&cfg)
}
