mod cli;
mod commands;
mod figures;
mod output;

use clap::Parser;

fn main() {
    let args = cli::Cli::parse();
    if let Err(err) = commands::run(args.command) {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}
