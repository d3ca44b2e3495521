use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use prepot_cli::error::{CliError, CliResult, EXIT_OK, EXIT_VERIFY_FAILED};
use prepot_cli::scenario::{Format, Scenario};
use prepot_cli::{cmd_field_grid, cmd_loop_phase, cmd_relations_dump, cmd_verify, OutputChoice};

#[derive(Debug, Parser)]
#[command(
    name = "prepot",
    version,
    about = "Complex pre-potential fields, checks and loop phases"
)]
struct Cli {
    /// Scenario file (JSON, schema version 1).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Seed for randomized checks; overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Multiplies every check tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate S, E, B and residuals on the scenario grid.
    FieldGrid,
    /// Run verification families (all when none named).
    Verify { checks: Vec<String> },
    /// Loop increments and winding numbers for the scenario loops.
    LoopPhase,
    /// Dump the generator matrices and relation report.
    RelationsDump,
}

fn require_scenario(cli: &Cli) -> CliResult<Scenario> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::config("--scenario", "this command needs a scenario file"))?;
    Scenario::load(path)
}

fn run(cli: &Cli) -> CliResult<i32> {
    let output = OutputChoice {
        format: cli.format,
        path: cli.out.clone(),
    };
    match &cli.command {
        Command::FieldGrid => {
            let scenario = require_scenario(cli)?;
            let (rows, masked) = cmd_field_grid(&scenario, &output)?;
            eprintln!("{rows} cells written, {masked} masked");
            Ok(EXIT_OK)
        }
        Command::Verify { checks } => {
            let scenario = cli
                .scenario
                .as_ref()
                .map(|p| Scenario::load(p))
                .transpose()?;
            let report = cmd_verify(checks, scenario.as_ref(), cli.seed, cli.tolerance_scale)?;
            report.write_text(std::io::stderr())?;
            if cli.format.is_some() || cli.out.is_some() {
                let (format, path) = output.resolve(None);
                match path {
                    Some(p) => report.write(format, std::fs::File::create(p)?)?,
                    None => report.write(format, std::io::stdout())?,
                }
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::LoopPhase => {
            let scenario = require_scenario(cli)?;
            cmd_loop_phase(&scenario, &output)
        }
        Command::RelationsDump => {
            cmd_relations_dump(&output)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
