use clap::Parser;
use haarcalc::cli::{execute, Cli};

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    std::process::exit(execute(&cli));
}
