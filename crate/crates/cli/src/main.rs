use clap::Parser;
use mixcsit_cli::args::{build_spec, Cli};
use mixcsit_cli::runner::execute;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = match build_spec(&cli.command) {
        Ok(spec) => spec,
        Err(err) => {
            eprintln!("mixcsit: {err}");
            return ExitCode::from(2);
        }
    };
    if let Err(err) = execute(&spec, None) {
        eprintln!("mixcsit: {err}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
