use clap::Parser;
use muthick::cli::{exit_code, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: could not start {n} worker threads: {e}");
            std::process::exit(2);
        }
    }
    if let Err(e) = run(&cli) {
        eprintln!("error [{}]: {e}", e.code());
        std::process::exit(exit_code(&e));
    }
}
