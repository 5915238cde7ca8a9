use clap::Parser;

fn main() {
    let cli = lpmhd::cli::Cli::parse();
    std::process::exit(lpmhd::cli::main_with(cli));
}
