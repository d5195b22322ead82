//! `qtomo`: batch front end over `qtomo-core`.
//!
//! Results go to stdout as JSON lines; the provenance header and warnings go
//! to stderr. Exit codes: 0 success, 2 usage, 3 I/O or format, 4 numerical
//! contract violation.

mod app;
mod run;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = app::Cli::parse();
    match run::execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
