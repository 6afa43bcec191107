use clap::Parser;

fn main() {
    let cli = qclrs::cli::Cli::parse();
    if let Err(e) = qclrs::cli::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
