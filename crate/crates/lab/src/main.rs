use std::process::ExitCode;

use clap::Parser;
use ident_lab::config::Cli;
use ident_lab::{parse_config, run, LabError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = parse_config(cli.command, cli.config.as_deref(), cli.settings)
        .map_err(LabError::from)
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ident-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
