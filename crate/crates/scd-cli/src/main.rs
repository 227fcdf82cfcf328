use clap::error::ErrorKind;
use clap::Parser;

use scd_cli::cli::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    if let Err(e) = scd_cli::run(&cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
