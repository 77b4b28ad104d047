use clap::Parser;
use finslerkit::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
