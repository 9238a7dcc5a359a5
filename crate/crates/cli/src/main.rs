use std::path::PathBuf;
use std::process::ExitCode;

use asgap::pipeline::verify::verify;
use asgap::pipeline::{ExperimentConfig, Outcome, Pipeline, Stage};
use asgap::{Error, Result};
use clap::{Parser, Subcommand};

/// Algorithm-selection generalization study on affine BBOB recombinations.
#[derive(Parser, Debug)]
#[command(name = "asgap", version)]
struct Cli {
    /// Experiment file (TOML).
    #[arg(short, long, global = true, default_value = "asgap.toml")]
    config: PathBuf,

    /// Worker threads; overrides the config file. 0 uses every core.
    #[arg(short, long, global = true)]
    workers: Option<usize>,

    /// Overwrite artifacts produced from a different config.
    #[arg(long, global = true)]
    force: bool,

    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the affine suite.
    Generate,
    /// Evaluate the Latin hypercube design on every problem.
    Sample,
    /// Run the portfolios and build performance matrices.
    Run,
    /// Compute and import feature groups.
    Features,
    /// Build the train/test split plans.
    Splits,
    /// Train and score selectors on every fold.
    TrainEval,
    /// Correlation, similarity and alignment analyses.
    Analyze,
    /// Summary tables and SVG figures.
    Report,
    /// Every stage in order.
    All,
    /// Run the built-in oracles; with an existing config, also check artifact hashes.
    Verify {
        /// Worker count for the determinism replay.
        #[arg(long, default_value_t = 4)]
        replay_workers: usize,
    },
    /// Print the default experiment file.
    DefaultConfig,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    if !cli.config.exists() {
        return Err(Error::Usage(format!(
            "config file {} not found (pass --config, or create one with `asgap default-config`)",
            cli.config.display()
        )));
    }
    let mut cfg = ExperimentConfig::load(&cli.config)?;
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    Ok(cfg)
}

fn run_stages(cli: &Cli, stages: &[Stage]) -> Result<()> {
    let pipeline = Pipeline::new(load(cli)?, cli.force);
    for &stage in stages {
        let outcome = pipeline.run_stage(stage)?;
        println!(
            "{stage}: {}",
            match outcome {
                Outcome::Ran => "done",
                Outcome::Cached => "up to date",
            }
        );
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    let stage = match &cli.command {
        Command::Generate => Stage::Generate,
        Command::Sample => Stage::Sample,
        Command::Run => Stage::Run,
        Command::Features => Stage::Features,
        Command::Splits => Stage::Splits,
        Command::TrainEval => Stage::TrainEval,
        Command::Analyze => Stage::Analyze,
        Command::Report => Stage::Report,
        Command::All => return run_stages(cli, &Stage::ALL),
        Command::DefaultConfig => {
            print!("{}", ExperimentConfig::default().to_toml());
            return Ok(());
        }
        Command::Verify { replay_workers } => {
            let out = if cli.config.exists() {
                Some(load(cli)?.output_dir)
            } else {
                None
            };
            let report = verify(out.as_deref(), *replay_workers);
            for line in report.lines() {
                println!("{line}");
            }
            return if report.passed() {
                Ok(())
            } else {
                Err(Error::Verification("one or more checks failed".into()))
            };
        }
    };
    run_stages(cli, &[stage])
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("asgap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
