use std::process::exit;

use clap::Parser;

use pir_cli::cli::{run, Cli, UsageError};

fn main() {
    // clap itself exits with 2 on malformed invocations.
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        if err.downcast_ref::<UsageError>().is_some() {
            eprintln!("usage error: {err}");
            exit(2);
        }
        eprintln!("error: {err:#}");
        exit(1);
    }
}
