use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use crossinfo::config::load_config;
use crossinfo::{report, run_pipeline, AppError, RunConfig, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "crossinfo", version, about = "Avoided-crossing sweeps with information-theoretic diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Flat TOML run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Override a configuration key, e.g. `--set steps=31`.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,
    /// Output directory; beats the environment and the file.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    /// Worker threads for the parameter points.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep and write the run directory.
    Run(ConfigArgs),
    /// Check a configuration and print its normalized form.
    Validate(ConfigArgs),
    /// Recompute diagnostics from the mode dumps of a finished run.
    Report {
        /// Run directory containing manifest.json.
        dir: PathBuf,
    },
}

fn parse_override(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))
}

fn load(args: &ConfigArgs) -> Result<RunConfig, AppError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| AppError::io(&args.config, e))?;
    let mut overrides = args.overrides.clone();
    if let Some(dir) = &args.output_dir {
        overrides.push(("output_dir".into(), toml::Value::String(dir.display().to_string()).to_string()));
    }
    if let Some(w) = args.workers {
        overrides.push(("workers".into(), w.to_string()));
    }
    Ok(load_config(&text, &overrides)?)
}

fn execute(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Validate(args) => {
            let config = load(&args)?;
            print!("{}", config.to_toml_string());
        }
        Command::Run(args) => {
            let config = load(&args)?;
            let result = run_pipeline(&config)?;
            let s = &result.manifest.summary;
            println!(
                "{}: {} steps, {} branches ({} tracking breaks), {} crossings; outputs in {}",
                result.manifest.backend,
                s.steps,
                s.branches,
                s.tracking_breaks,
                s.crossings,
                config.output_dir.display()
            );
        }
        Command::Report { dir } => {
            let records = report(&dir)?;
            println!("re-derived diagnostics for {} dumps", records.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
