//! Command-line front end for the light-cone collapse simulator.
//!
//! Exit codes: 0 success, 2 invalid parameters or malformed inputs,
//! 3 outside the series regime, 64 usage errors (unknown command/flags).

use clap::error::ErrorKind;
use clap::Parser;

use collapse_sim::args::{Cli, Command};
use collapse_sim::commands;
use collapse_sim::error::CliResult;

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Series(a) => commands::series::run(a),
        Command::Mc(a) => commands::mc::run(a, false),
        Command::Epr(a) => commands::mc::run(a, true),
        Command::Kg(a) => commands::kg::run(a),
        Command::Shift(a) => commands::shift::run(a),
        Command::Magnitudes(a) => commands::magnitudes::run(a),
        Command::Sweep(a) => commands::sweep::run(a),
        Command::Plot(a) => commands::plot::run(a),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    std::process::exit(0);
                }
                ErrorKind::InvalidSubcommand | ErrorKind::UnknownArgument => 64,
                _ => 2,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.code());
        }
    }
}
