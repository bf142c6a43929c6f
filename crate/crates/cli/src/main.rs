mod args;
mod commands;
mod manifest;
mod settings;

use std::process::ExitCode;

use clap::Parser;

use args::{AnnotateCommand, Cli, Command};
use settings::CliResult;

fn dispatch(cli: &Cli) -> CliResult<()> {
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Synth(a) => commands::synth::run(config, a),
        Command::Train(a) => commands::train::run(config, a),
        Command::Attack(a) => commands::attack::run(config, a),
        Command::Evaluate(a) => commands::evaluate::run(config, a),
        Command::Annotate(AnnotateCommand::Export(a)) => commands::annotate::export(config, a),
        Command::Annotate(AnnotateCommand::Rate(a)) => commands::annotate::rate(config, a),
        Command::Correlate(a) => commands::correlate::run(config, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("advmt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
