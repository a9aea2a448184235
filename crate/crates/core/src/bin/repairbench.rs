use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use repairbench::config::{ConfigError, EpisodeConfig};
use repairbench::env::{EnvError, Environment};
use repairbench::harness::validate::{run_validation, ValidationOptions};
use repairbench::harness::{interactive_session, run_experiment, write_aggregate, write_metrics, ExperimentConfig};
use repairbench::protocol::{serve_stdio, Server};

#[derive(Parser)]
#[command(name = "repairbench", version, about = "Instruction following with incremental action corrections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write metrics CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seeds: Option<u32>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Play the instructor in the terminal.
    Play {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Drive the agent with typed moves instead of the oracle.
        #[arg(long)]
        keyboard: bool,
    },
    /// Run the oracle and blind-oracle suites and print pass/fail lines.
    Validate {
        #[arg(long, default_value_t = 1000)]
        episodes: u32,
        #[arg(long, default_value_t = 10_000)]
        blind_episodes: u32,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve the line protocol over TCP or stdio.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878", conflicts_with = "stdio")]
        addr: String,
        #[arg(long)]
        stdio: bool,
    },
}

enum Failure {
    Config(ConfigError),
    Acceptance,
    Other(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<EnvError> for Failure {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::Config(c) => Failure::Config(c),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn other<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Other(e.to_string())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, out, seeds, workers } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seeds {
                cfg.seeds = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            cfg.validate()?;
            let result = run_experiment(&cfg)?;
            std::fs::create_dir_all(&out).map_err(other)?;
            write_metrics(&result.table, &out.join("metrics.csv")).map_err(other)?;
            let agg = result.table.aggregate();
            write_aggregate(&agg, &out.join("aggregate.csv")).map_err(other)?;
            for r in &result.runs {
                if let Some(p) = &r.params {
                    let f = std::fs::File::create(out.join(format!("params_seed{}.txt", r.seed))).map_err(other)?;
                    p.save(std::io::BufWriter::new(f)).map_err(other)?;
                }
            }
            if let Some(last) = agg.last() {
                let corr = last.correction_mean.map_or("n/a".into(), |c| format!("{c:.3}"));
                println!(
                    "final: overall {:.3} ± {:.3}, correction-only {corr}, mean episode length {:.1}",
                    last.overall_mean, last.overall_std, last.mean_ep_len
                );
            }
            println!("wrote {}", out.join("metrics.csv").display());
            Ok(())
        }
        Command::Play { config, seed, keyboard } => {
            let cfg = match config {
                Some(path) => EpisodeConfig::load(&path)?,
                None => EpisodeConfig {
                    backend: repairbench::world::Backend::Grid,
                    ..Default::default()
                },
            };
            let env = Environment::new(cfg)?;
            let stdin = std::io::stdin();
            let summary = interactive_session(&env, seed, keyboard, stdin.lock(), std::io::stdout()).map_err(other)?;
            println!("steps: {}, success: {}", summary.steps, summary.success);
            Ok(())
        }
        Command::Validate { episodes, blind_episodes, workers, seed } => {
            let opts = ValidationOptions {
                oracle_episodes: episodes,
                blind_episodes,
                mix_resets: 10_000,
                workers,
                seed,
            };
            let checks = run_validation(&opts)?;
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().all(|c| c.passed) {
                Ok(())
            } else {
                Err(Failure::Acceptance)
            }
        }
        Command::Serve { addr, stdio } => {
            if stdio {
                return serve_stdio().map_err(other);
            }
            let server = Server::bind(&addr).map_err(|e| Failure::Other(format!("bind {addr}: {e}")))?;
            eprintln!("listening on {}", server.local_addr().map_err(other)?);
            server.run().map_err(other)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(Failure::Acceptance) => {
            eprintln!("validation failed");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
