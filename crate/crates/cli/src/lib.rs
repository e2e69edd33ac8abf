//! Command-line layer over `rskp-core`: JSON state files, CSV tables and
//! verification reports.
//!
//! Exit codes: 0 success, 1 failed verification, 2 bad input, 3 collision.

pub mod checks;
pub mod cli;
pub mod commands;
pub mod error;
pub mod io;
pub mod parse;

pub use cli::Cli;
pub use error::CliError;

pub fn run(cli: &Cli) -> error::Result<()> {
    use cli::Command;
    let g = &cli.global;
    match &cli.command {
        Command::Init(a) => commands::init(g, a),
        Command::Evolve(a) => commands::evolve(g, a),
        Command::Tau(a) => commands::tau(g, a),
        Command::Wave(a) => commands::wave(g, a),
        Command::Verify(a) => commands::verify(g, a),
    }
}
