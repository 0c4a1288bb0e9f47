use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use rescat_cli::{execute, Cli, ErrorRecord};

fn fail(message: &str, record: &ErrorRecord) -> ExitCode {
    eprintln!("rescat: {message}");
    println!("{}", serde_json::json!({ "error": record }));
    ExitCode::from(record.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let message = e.kind().as_str().unwrap_or("invalid arguments").to_string();
            return fail(&message, &ErrorRecord { kind: "usage", exit_code: 2, message: message.clone() });
        }
    };
    match execute(&cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e.to_string(), &e.record()),
    }
}
