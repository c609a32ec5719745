use clap::Parser;
use stationary_discs::cli;

fn main() {
    let cli = cli::Cli::parse();
    std::process::exit(cli::run(cli));
}
