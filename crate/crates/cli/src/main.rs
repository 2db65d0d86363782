use clap::Parser;

fn main() {
    let cli = cantorvis_cli::Cli::parse();
    std::process::exit(cantorvis_cli::main_with(&cli));
}
