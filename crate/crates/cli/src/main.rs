use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use sppe_cli::{run, Cli, EXIT_INPUT, EXIT_INTERNAL};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sppe: {e}");
            EXIT_INTERNAL
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
