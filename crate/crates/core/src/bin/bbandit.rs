use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use budgeted_bandits::cli::{self, CliError, ExperimentConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bbandit", version, about = "Budgeted bandit experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the oracle and every configured policy, writing CSV results.
    Run {
        config: PathBuf,
        /// Override `run.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Override `run.trials`.
        #[arg(long)]
        trials: Option<usize>,
        /// Override `run.output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a config without simulating.
    Validate { config: PathBuf },
    /// Print closed-form regret coefficients without simulating.
    Bounds { config: PathBuf },
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cli::parse_config(&text)
}

fn warn(cfg: &ExperimentConfig) {
    for (name, d) in cli::diagnostics(cfg) {
        eprintln!("warning: policy `{name}`: {d}");
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            config,
            seed,
            trials,
            out,
        } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(t) = trials {
                if t == 0 {
                    return Err(CliError::Config("--trials: must be at least 1".into()));
                }
                cfg.trials = t;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            warn(&cfg);
            let result = cli::run_experiment(&cfg)?;
            cli::write_outputs(&cfg, &result, &cfg.output_dir)?;
            println!("wrote {}", cfg.output_dir.display());
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            warn(&cfg);
            println!(
                "ok: {} arms, {} policies, {} budgets, {} trials",
                cfg.instance.num_arms(),
                cfg.policies.len(),
                cfg.budgets.len(),
                cfg.trials
            );
        }
        Command::Bounds { config } => {
            let cfg = load(&config)?;
            print!("{}", cli::format_bounds(&cfg));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
