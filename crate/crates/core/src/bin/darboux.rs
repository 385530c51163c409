use clap::Parser;

fn main() {
    let cli = darboux::cli::Cli::parse();
    std::process::exit(darboux::cli::run(&cli));
}
