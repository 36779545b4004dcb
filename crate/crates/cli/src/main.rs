use clap::Parser;

fn main() {
    let cli = tightbench_cli::config::Cli::parse();
    if let Err(e) = tightbench_cli::run(cli) {
        eprintln!("tightbench: {e}");
        std::process::exit(e.exit_code());
    }
}
