use clap::Parser;

use qfi::{exit_code, run, Cli, Command};

fn main() {
    let cli = Cli::parse();
    let command = match Command::from_cli(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    };
    match run(&command, cli.human) {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
