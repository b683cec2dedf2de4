use std::process::ExitCode;

use clap::Parser;
use primform::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = cli.execute();
    print!("{text}");
    if code != 0 {
        eprintln!("primform: job failed; see the error document");
    }
    ExitCode::from(code as u8)
}
