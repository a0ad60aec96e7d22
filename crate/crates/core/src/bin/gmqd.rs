use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gmqd::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = match run(cli, &mut lock) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    let _ = lock.flush();
    ExitCode::from(code)
}
