use clap::Parser;
use std::process::ExitCode;

use tamed_euler_cli::run::{build_config, run_and_write};
use tamed_euler_cli::{Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let (cfg, threads) = build_config(cli)?;
    let exp = cfg.resolve()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_and_write(&exp))
}
