use std::process;

use clap::Parser;

use qread_cli::cli::Cli;

fn main() {
    // Argument errors exit with code 2 through clap itself.
    let cli = Cli::parse();
    if let Err(err) = qread_cli::run(cli) {
        eprintln!("error: {err}");
        process::exit(err.exit_code());
    }
}
