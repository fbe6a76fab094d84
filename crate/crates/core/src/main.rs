use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use locillusion::cli::{cmd_default, cmd_gain, cmd_run, format_gain, CliError};
use locillusion::ProducerMode;

#[derive(Parser)]
#[command(name = "locillusion", version, about = "Simulate trilateration spoofing with LQR and MPC producers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write trajectory.csv, trajectory.svg and actions.svg
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the producer mode (the receiver variant follows it)
        #[arg(long)]
        mode: Option<ProducerMode>,
    },
    /// Print the LQR producer gain for a scenario
    Gain {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Write the default two-experiment scenario file
    Default {
        #[arg(long)]
        out: PathBuf,
    },
}

fn fail(err: CliError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out, mode } => match cmd_run(&scenario, &out, mode) {
            Ok(output) => {
                println!("{}", output.summary());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Gain { scenario } => match cmd_gain(&scenario) {
            Ok(sol) => {
                print!("{}", format_gain(&sol));
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Default { out } => match cmd_default(&out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
    }
}
