use clap::Parser;

fn main() {
    std::process::exit(mopf_cli::run(mopf_cli::Cli::parse()));
}
