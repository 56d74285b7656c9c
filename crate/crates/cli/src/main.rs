use clap::Parser;
use sparse_afe_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = execute(cli) {
        eprintln!("sparse-afe: {err}");
        std::process::exit(err.exit_code());
    }
}
