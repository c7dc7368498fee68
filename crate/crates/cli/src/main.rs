use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use coherent_cli::output::{render, write_all};
use coherent_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli.command).and_then(|tables| match cli.command.out() {
        Some(dir) => write_all(dir, &tables),
        None => std::io::stdout()
            .write_all(render(&tables).as_bytes())
            .map_err(Into::into),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coherent: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
