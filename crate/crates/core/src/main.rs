use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fem_evidence::config::{validate_config, ConfigError};
use fem_evidence::experiment::{run_experiment, RunOptions};

/// Bayesian evidence and model ranking for FE updating hypotheses.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// Experiment config (TOML)
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Base seed, overriding `sampler.rng_seed`
    #[arg(long)]
    seed: Option<u64>,
    /// Also write trace_<name>.csv per hypothesis
    #[arg(long)]
    trace: bool,
    /// Check the config and exit without sampling
    #[arg(long)]
    validate_only: bool,
    /// Run hypotheses one after another on a single thread
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let path = cli.config.display().to_string();

    if cli.validate_only {
        return match validate_config(&cli.config) {
            Ok(d) if d.is_empty() => {
                println!("{path}: ok");
                ExitCode::SUCCESS
            }
            Ok(d) => {
                for diag in d {
                    eprintln!("{path}: {diag}");
                }
                ExitCode::from(1)
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(1)
            }
        };
    }

    if cli.sequential {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    let opts = RunOptions {
        out_dir: cli.out,
        seed: cli.seed,
        trace: cli.trace,
        concurrent: !cli.sequential,
    };
    match run_experiment(&cli.config, &opts) {
        Ok(outcome) => {
            print!("{}", outcome.report.to_text());
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                fem_evidence::experiment::RunError::Config(ConfigError::Invalid(diags)) => {
                    for d in diags {
                        eprintln!("{path}: {d}");
                    }
                }
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
