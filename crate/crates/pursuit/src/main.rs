use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pursuit::export::write_outputs;
use pursuit::run::{compare_scenario, predict_scenario};
use pursuit::summary::{summarize_predictions, summarize_spectrum};
use pursuit::{load_scenario, presets, run_scenario, Error, MethodChoice, Overrides, Tolerances};

/// Simulate and predict deviated cyclic pursuit under broadcast control.
#[derive(Debug, Parser)]
#[command(name = "pursuit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario JSON file.
    file: PathBuf,
    /// Integration step, overriding the file.
    #[arg(long)]
    dt: Option<f64>,
    /// End time, overriding the file.
    #[arg(long)]
    t_max: Option<f64>,
    /// Deviation angle in degrees, overriding the file.
    #[arg(long, allow_hyphen_values = true)]
    theta_deg: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
}

impl ScenarioArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            dt: self.dt,
            t_max: self.t_max,
            theta_deg: self.theta_deg,
            method: self.method,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write trajectories, plot series and a report.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the asymptotic prediction for every interval.
    Predict {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Run both solvers and print the comparison report.
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Also write all output files here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the eigenvalues of the system matrix.
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        theta_deg: f64,
    },
    /// List the built-in scenarios, or write them to a directory.
    Presets {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status for a comparison whose checks did not all pass.
const EXIT_CHECKS_FAILED: u8 = 4;

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output types serialize")
}

fn execute(cmd: Command) -> Result<u8, Error> {
    let tol = Tolerances::default();
    match cmd {
        Command::Simulate { scenario, out } => {
            let s = load_scenario(&scenario.file, &scenario.overrides())?;
            let run = run_scenario(&s, &tol)?;
            let files = write_outputs(&run, &out)?;
            for t in &run.report.truncations {
                eprintln!(
                    "warning: {} run stopped at t = {} (state overflow)",
                    t.method, t.t
                );
            }
            println!("wrote {} files to {}", files.len(), out.display());
            Ok(if run.truncated() { 2 } else { 0 })
        }
        Command::Predict { scenario } => {
            let s = load_scenario(&scenario.file, &scenario.overrides())?;
            let preds = predict_scenario(&s)?;
            println!("{}", json(&summarize_predictions(&s, &preds)));
            Ok(0)
        }
        Command::Compare { scenario, out } => {
            let s = load_scenario(&scenario.file, &scenario.overrides())?;
            let run = compare_scenario(&s, &tol)?;
            if let Some(dir) = out {
                write_outputs(&run, &dir)?;
            }
            println!("{}", run.report.to_json());
            Ok(if run.truncated() {
                2
            } else if run.report.pass {
                0
            } else {
                EXIT_CHECKS_FAILED
            })
        }
        Command::Spectrum { n, theta_deg } => {
            println!("{}", json(&summarize_spectrum(n, theta_deg)?));
            Ok(0)
        }
        Command::Presets { out: Some(dir) } => {
            for p in presets::write_all(&dir)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
        Command::Presets { out: None } => {
            for p in presets::PRESETS {
                println!("{:<10} {}", p.name, p.summary);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
