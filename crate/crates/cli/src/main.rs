use std::path::PathBuf;
use std::process::ExitCode;

use bpielm::problems::ProblemId;
use bpielm_cli::config::ExperimentConfig;
use bpielm_cli::{output, runner, RunError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bpielm", version, about = "Bayesian physics-informed ELM experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configuration's output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Comma-separated seed list overriding the configuration's seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// List the benchmark problems.
    ListProblems,
    /// Check a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(config: PathBuf, output_dir: Option<PathBuf>, seeds: Option<Vec<u64>>) -> Result<(), RunError> {
    let mut config = ExperimentConfig::load(&config)?;
    if let Some(dir) = output_dir {
        config.output_dir = dir;
    }
    if let Some(seeds) = seeds {
        config.seeds = seeds;
        config.validate()?;
    }
    let records = runner::run_experiment(&config)?;
    output::write_all(&records, &config.output_dir, config.write_grids)?;

    let summary = output::summarize(&records);
    for g in &summary.groups {
        let sweep = match (&g.sweep_axis, g.sweep_value) {
            (Some(a), Some(v)) => format!(" {a}={v}"),
            _ => String::new(),
        };
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        eprintln!(
            "{}{sweep}: runs={} failed={} median MAE={} Max-AE={} coverage={}{}",
            g.method,
            g.runs,
            g.failed,
            fmt(g.median_mae),
            fmt(g.median_max_ae),
            fmt(g.median_coverage),
            if g.median_lambda.is_empty() {
                String::new()
            } else {
                format!(" lambda={:?}", g.median_lambda)
            }
        );
    }
    eprintln!("wrote {}", config.output_dir.display());

    let failed: Vec<&str> = records
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().map(String::as_str))
        .collect();
    if let Some(first) = failed.first() {
        return Err(RunError::Numerical(format!(
            "{} run(s) failed; first: {first}",
            failed.len()
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            output_dir,
            seeds,
        } => run(config, output_dir, seeds),
        Command::ListProblems => {
            for id in ProblemId::ALL {
                println!("{:<22} {}", id.name(), id.description());
            }
            Ok(())
        }
        Command::Validate { config } => ExperimentConfig::load(&config).map(|c| {
            println!("{}: ok ({} seeds)", c.problem, c.seeds.len());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
