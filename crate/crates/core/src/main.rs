use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coexsim::config::{parse_config, parse_override, parse_value_list};
use coexsim::interference::campbell_cases;
use coexsim::preset::{run_preset, run_single, Output, Preset, PresetOptions, DEFAULT_DROPS};
use coexsim::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "coexsim",
    version,
    about = "Radar / Wi-Fi coexistence Monte Carlo simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override a config key, e.g. `--set theta_deg=90`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Regenerate one of the figure tables.
    Preset {
        name: String,
        #[arg(long, default_value_t = DEFAULT_DROPS)]
        drops: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Axis values: separations in km (fig3) or thresholds in degrees (fig5, fig6).
        #[arg(long)]
        values: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Statistical self-checks.
    Oracle {
        #[command(subcommand)]
        which: Oracle,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Empirical vs analytic mean of Poisson sums.
    Campbell {
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidConfig(_) | Error::InvalidGeometry(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn emit(output: &Output, out: &Path) -> Result<(), Failure> {
    let files = output
        .write(out)
        .map_err(|e| Failure::Runtime(format!("writing {}: {e}", out.display())))?;
    for (label, r) in &output.runs {
        eprintln!(
            "{label}: INR {:.2} dB, {} drops, {} fallbacks, {:.1} s",
            r.inr_mean_db,
            r.drop_count,
            r.sweep_fallbacks,
            r.wall_time.as_secs_f64()
        );
    }
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            overrides,
            workers,
        } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Failure::Config(format!("reading {}: {e}", config.display())))?;
            let mut pairs = overrides
                .iter()
                .map(|o| parse_override(o))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::Config)?;
            if let Some(s) = seed {
                pairs.push(("seed".into(), s.to_string()));
            }
            let cfg = parse_config(&text, &pairs)
                .map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
            emit(&run_single(&cfg, workers)?, &out)
        }
        Command::Preset {
            name,
            drops,
            out,
            seed,
            values,
            workers,
        } => {
            let preset: Preset = name.parse().map_err(Failure::Config)?;
            let values = values
                .map(|v| parse_value_list(&v))
                .transpose()
                .map_err(|e| Failure::Config(format!("--values: {e}")))?;
            if drops == 0 {
                return Err(Failure::Config("--drops must be at least 1".into()));
            }
            let options = PresetOptions {
                drops,
                seed,
                values,
                workers,
            };
            emit(&run_preset(preset, &options)?, &out)
        }
        Command::Oracle {
            which: Oracle::Campbell { trials, seed },
        } => {
            if trials < 2 {
                return Err(Failure::Config("--trials must be at least 2".into()));
            }
            let mut all_ok = true;
            println!("case,empirical_mean,std_error,analytic_mean,closed_form,z");
            for case in campbell_cases(trials, seed) {
                let e = case.estimate;
                let z = e.z_score();
                all_ok &= z < 3.0;
                println!(
                    "{},{:.6e},{:.3e},{:.6e},{},{:.3}",
                    case.name,
                    e.empirical_mean,
                    e.empirical_std_error,
                    e.analytic_mean,
                    case.closed_form.map_or("".into(), |c| format!("{c:.6e}")),
                    z
                );
            }
            if all_ok {
                Ok(())
            } else {
                Err(Failure::Runtime(
                    "a case deviates by 3 standard errors or more".into(),
                ))
            }
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
