use std::process::ExitCode;

use clap::Parser;
use infoorder::cli::{run, write_atomic, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let output = run(cli)?;
    let text = output.rendered(cli.format)?;
    print!("{text}");
    if let Some(path) = &cli.out {
        write_atomic(path, &text)?;
    }
    for (path, contents) in &output.side_files {
        write_atomic(path, contents)?;
    }
    Ok(output.exit_code)
}
