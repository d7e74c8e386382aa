use std::process::ExitCode;

use clap::Parser;
use cmjtree_cli::{run, Cli, RunError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.into_config().map_err(RunError::from).and_then(|cfg| run(&cfg));
    match result {
        Ok(out) => {
            if let Some(s) = out.stdout {
                println!("{s}");
            }
            eprintln!("wrote {} and {}", out.csv_path.display(), out.sidecar_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cmjtree: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
