use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use kobdd_cli::{run, Cli, EXIT_INTERNAL};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let code = match run(&cli.command) {
        Ok(report) => {
            let out = if cli.json { report.json_line() + "\n" } else { report.text.clone() };
            match std::io::stdout().write_all(out.as_bytes()) {
                Ok(()) => report.exit_code(),
                Err(_) => EXIT_INTERNAL,
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", e.to_record(name));
            }
            eprintln!("kobdd {name}: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
