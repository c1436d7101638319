use clap::Parser;

fn main() {
    let cli = cucb::cli::Cli::parse();
    std::process::exit(cucb::cli::main_with(cli));
}
