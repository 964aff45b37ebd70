//! `zeno`: tabulates decay rates, spectra, decay curves, trajectory
//! ensembles, and validity diagnostics as CSV or JSON with reproducible
//! metadata headers.

mod commands;
mod config;
mod output;

use clap::Parser;

fn main() {
    let cli = config::Cli::parse();
    if let Err(e) = commands::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
