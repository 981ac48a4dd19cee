use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fracburgers_cli::{parse_scenario_file, run, sweep, CliError};

#[derive(Parser)]
#[command(name = "fracburgers", version, about = "Run fractional Burgers scenarios")]
struct Cli {
    /// Directory for field tables and summaries.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Do not print the report.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run { scenario: PathBuf },
    /// Run an fbenn scenario for each order in a comma-separated list.
    Sweep {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        p: Vec<f64>,
    },
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let report = match &cli.command {
        Command::Run { scenario } => serde_json::to_string_pretty(&run(&parse_scenario_file(scenario)?, &cli.out_dir)?),
        Command::Sweep { scenario, p } => {
            serde_json::to_string_pretty(&sweep(&parse_scenario_file(scenario)?, p, &cli.out_dir)?)
        }
    };
    report.map_err(|e| CliError::Io(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            if !cli.quiet {
                println!("{report}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
