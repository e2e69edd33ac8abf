use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = rskp::Cli::parse();
    match rskp::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rskp: {e}");
            e.exit_code()
        }
    }
}
