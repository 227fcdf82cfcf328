//! Library surface of the `scd` command-line tool. The binary is a thin
//! wrapper; everything it does is callable (and tested) from here.

pub mod cli;
pub mod commands;

use cli::{Cli, CliResult, Command};

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Embed(args) => commands::embed::run(args),
        Command::Detect(args) => commands::detect::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
    }
}
