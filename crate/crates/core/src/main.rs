use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rdf2gml::config::{load_config, FeatureMode};
use rdf2gml::pipeline::{apply_overrides, describe_plan, run, RunOptions};

/// Compile an RDF dump into a graph machine-learning dataset.
#[derive(Debug, Parser)]
#[command(name = "rdf2gml", version)]
struct Cli {
    /// TOML configuration file
    #[arg(short, long, env = "RDF2GML_CONFIG")]
    config: PathBuf,
    /// Output directory (overrides output.dir)
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// content, topology or both (overrides features.mode)
    #[arg(long)]
    features: Option<FeatureMode>,
    /// Random seed (overrides features.seed)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores
    #[arg(long)]
    threads: Option<usize>,
    /// Skip malformed statements instead of aborting
    #[arg(long)]
    lenient: bool,
    /// Validate the config and print the plan without reading the dump
    #[arg(long)]
    dry_run: bool,
    /// error, warn, info, debug or trace
    #[arg(long, default_value = "info")]
    log_level: log::LevelFilter,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.log_level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();

    let validated = match load_config(&cli.config) {
        Ok(v) => v,
        Err(e) => {
            log::error!("{e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        out_dir: cli.out,
        mode: cli.features,
        seed: cli.seed,
        lenient: cli.lenient,
        threads: cli.threads,
    };
    if cli.dry_run {
        print!("{}", describe_plan(&apply_overrides(&validated.config, &opts)));
        return ExitCode::SUCCESS;
    }
    match run(&validated, &opts) {
        Ok(outcome) => {
            log::info!("dataset written to {}", outcome.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::FAILURE
        }
    }
}
