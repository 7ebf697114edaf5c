use clap::Parser;

use thirdgrade::cli::{run, Cli, Exit};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
    {
        eprintln!("error: thread pool: {e}");
        std::process::exit(Exit::Invalid.code());
    }
    std::process::exit(run(&cli).code());
}
