use clap::Parser;

fn main() {
    let cli = effdist::cli::Cli::parse();
    std::process::exit(effdist::cli::run_to_completion(cli));
}
