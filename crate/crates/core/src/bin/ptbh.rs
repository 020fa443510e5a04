use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ptbh::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version land here too and are not errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &output.text),
        None => std::io::stdout().lock().write_all(output.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if output.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
