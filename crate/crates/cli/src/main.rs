use clap::Parser;

use darkdetect_cli::{dispatch, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(error) = dispatch(&cli) {
        eprintln!("{}", error.machine_line());
        std::process::exit(error.exit_code());
    }
}
