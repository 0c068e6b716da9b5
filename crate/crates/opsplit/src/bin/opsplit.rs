use clap::Parser;

fn main() {
    let cli = opsplit::cli::Cli::parse();
    std::process::exit(opsplit::cli::execute(cli));
}
