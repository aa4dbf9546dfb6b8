#![allow(clippy::result_large_err)]

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use erasure_ft_cli::manifest::write_with_manifest;
use erasure_ft_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| match &cli.global.out {
        Some(path) => write_with_manifest(path, &out.body, &out.manifest),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.body.as_bytes())
                .map_err(|e| erasure_ft_cli::CliError::io("<stdout>", e))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
