use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = simpol::Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match simpol::run(cli, &mut lock) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
