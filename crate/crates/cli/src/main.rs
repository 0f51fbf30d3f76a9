use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use wdmrev::exit;
use wdmrev::run::{execute, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::OK as u8 });
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: cannot start {} threads: {e}", cli.threads);
            return ExitCode::from(exit::OTHER as u8);
        }
    }
    let echo = std::env::args().collect::<Vec<_>>().join(" ");
    let (rendered, error) = match execute(&cli, &echo) {
        Ok(rendered) => (Some(rendered), None),
        Err((rendered, error)) => (rendered, Some(error)),
    };
    if let Some(r) = rendered {
        let _ = std::io::stdout().write_all(r.stdout.as_bytes());
        let _ = std::io::stderr().write_all(r.stderr.as_bytes());
    }
    match error {
        None => ExitCode::from(exit::OK as u8),
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
