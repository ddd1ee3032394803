use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use plopen_cli::commands::{run, Cli, Output};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { plopen_cli::exit::MALFORMED } else { plopen_cli::exit::OK };
            return ExitCode::from(code as u8);
        }
    };
    let out = run(&cli);
    if let Output::Report(r) = &out {
        if let Some(e) = r.results.get("error").and_then(|e| e.as_str()) {
            eprintln!("plopen {}: {e}", r.command);
        }
    }
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.render().as_bytes());
    ExitCode::from(out.exit_code() as u8)
}
