use std::process::ExitCode;

use clap::Parser;

use segmint_cli::{run, Command, Overrides, RunConfig};

/// Behavioural-group extraction from socio-economic tables.
#[derive(Parser)]
#[command(name = "segmint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::resolve(&cli.overrides).and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
