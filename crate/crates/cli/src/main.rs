use clap::Parser;

fn main() {
    let cli = hypvoro_cli::Cli::parse();
    if let Err(e) = hypvoro_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
