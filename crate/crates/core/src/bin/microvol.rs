use clap::Parser;
use microvol::cli::{dispatch, RunConfig};

fn main() {
    let config = RunConfig::parse();
    if let Err(err) = dispatch(&config) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
