use clap::Parser;
use nacy_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = execute(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(e.exit_code());
    }
}
