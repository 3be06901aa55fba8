mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{RunConfig, Task};
use persuasion::features::{Family, Variant};
use persuasion::report::ReportError;

/// Analysis pipeline for persuasive-argument discussion corpora.
#[derive(Parser)]
#[command(name = "persuasion", version, about)]
struct Cli {
    /// JSON run configuration; flags below override individual fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Artifact directory shared by all stages.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    variant: Option<Variant>,
    #[arg(long, global = true, value_enum)]
    task: Option<Task>,
    #[arg(long, global = true)]
    resources: Option<PathBuf>,
    /// Comma-separated feature families (interplay,style,bow,pos,quarters).
    #[arg(long, global = true, value_delimiter = ',')]
    families: Option<Vec<Family>>,
    #[arg(long, global = true)]
    resamples: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a JSONL corpus into the normalized tree format plus a summary report.
    Ingest {
        /// Input JSONL file, one discussion per line.
        #[arg(long)]
        input: PathBuf,
        /// Treat the input as raw scrape output rather than normalized records.
        #[arg(long)]
        raw: bool,
    },
    /// Emit the binned dynamics tables (entry order, back-and-forth, …).
    Dynamics,
    /// Build matched argument pairs and the malleability instance list.
    Pairs,
    /// Extract feature matrices for the configured task and variant.
    Features,
    /// Fit the penalized logistic-regression model with cross-validated lambda.
    Train,
    /// Score the held-out split and run the configured significance tests.
    Eval,
    /// Produce the per-feature direction/significance tables for all variants.
    Significance,
}

fn apply_overrides(config: &mut RunConfig, cli: &Cli) {
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(variant) = cli.variant {
        config.variant = variant;
    }
    if let Some(task) = cli.task {
        config.task = task;
    }
    if let Some(resources) = &cli.resources {
        config.resources = resources.clone();
    }
    if let Some(families) = &cli.families {
        config.families = families.clone();
    }
    if let Some(n) = cli.resamples {
        config.n_resamples = n;
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let mut config = RunConfig::load(cli.config.as_deref())?;
    apply_overrides(&mut config, cli);
    match &cli.command {
        Command::Ingest { input, raw } => pipeline::cmd_ingest(&config, input, &cli.out, *raw),
        Command::Dynamics => pipeline::cmd_dynamics(&config, &cli.out),
        Command::Pairs => pipeline::cmd_pairs(&config, &cli.out),
        Command::Features => pipeline::cmd_features(&config, &cli.out),
        Command::Train => pipeline::cmd_train(&config, &cli.out),
        Command::Eval => pipeline::cmd_eval(&config, &cli.out),
        Command::Significance => pipeline::cmd_significance(&config, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if matches!(
                err.downcast_ref::<ReportError>(),
                Some(ReportError::StaleArtifact { .. })
            ) {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
