use std::io;
use std::process::ExitCode;

use clap::Parser;
use isotrope_cli::commands::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code as u8)
        }
    }
}
