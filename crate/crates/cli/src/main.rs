use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zeno_cli::{
    as_rate_config, execute, preset_config, presets, CliError, ExperimentConfig, RunOptions,
    OUT_DIR_ENV,
};

#[derive(Parser)]
#[command(name = "zeno", version, about = "Stochastic quantum Zeno experiments")]
struct Cli {
    /// Worker threads for ensemble runs (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config.
    Run {
        config: PathBuf,
        /// Directory for relative output paths.
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
    /// Run a built-in preset.
    Preset {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
    /// List built-in presets.
    Presets {
        /// Print every preset's full config.
        #[arg(long)]
        dump: bool,
    },
    /// Analytic and empirical rate functions for a config.
    Rate {
        config: PathBuf,
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (cfg, opts) = match cli.command {
        Command::Presets { dump } => {
            if dump {
                for p in &presets::PRESETS {
                    println!("### {}\n{}", p.name, p.toml);
                }
            } else {
                print!("{}", presets::table());
            }
            return Ok(());
        }
        Command::Run { config, out } => (
            ExperimentConfig::from_path(&config)?,
            RunOptions {
                out_dir: out,
                ..Default::default()
            },
        ),
        Command::Rate { config, out } => (
            as_rate_config(ExperimentConfig::from_path(&config)?)?,
            RunOptions {
                out_dir: out,
                ..Default::default()
            },
        ),
        Command::Preset { name, seed, out } => (
            preset_config(&name)?,
            RunOptions {
                out_dir: out,
                seed,
                ..Default::default()
            },
        ),
    };
    let opts = RunOptions {
        workers: cli.workers,
        ..opts
    };
    let report = execute(&cfg, &opts)?;
    report.write()?;
    print!("{}", report.summary_table());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zeno: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
