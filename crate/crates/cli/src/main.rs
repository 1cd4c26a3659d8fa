use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::LazyLock;

use anyhow::Context;
use clap::{Parser, Subcommand};
use radarclass::classifier::MODEL_FORMAT_VERSION;
use radarclass::ensemble::ENSEMBLE_FORMAT_VERSION;
use radarclass::eval::REPORT_FORMAT_VERSION;
use radarclass::features::CATALOG_VERSION;
use radarclass::pipeline::{Outcome, Pipeline, RunConfig, Stage};

const DEFAULT_OUT: &str = "radarclass-out";

static VERSION: LazyLock<String> = LazyLock::new(|| {
    format!(
        "{}\ncatalog {CATALOG_VERSION}\nmodel {MODEL_FORMAT_VERSION}\nensemble {ENSEMBLE_FORMAT_VERSION}\nreport {REPORT_FORMAT_VERSION}",
        env!("CARGO_PKG_VERSION")
    )
});

/// Radar road-user classification pipeline.
#[derive(Debug, Parser)]
#[command(name = "radarclass", version = VERSION.as_str())]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configured seed everywhere.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, env = "RADARCLASS_OUT")]
    out: Option<PathBuf>,

    /// Re-run stages even when their stamp is current.
    #[arg(long, global = true)]
    force: bool,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Generate a synthetic scene.
    Gen,
    /// Cluster and annotate detections.
    Cluster,
    /// Extract features, with augmented copies.
    Extract,
    /// Rank features per ensemble member.
    Rank,
    /// Guided backward elimination per member.
    Select,
    /// Train the deployed ensemble.
    Train,
    /// Sweep hidden-class detector thresholds.
    Sweep,
    /// Cross-validate masks against the shared full feature set.
    Eval,
    /// Write the text report and tables.
    Report,
    /// Run every enabled stage in order.
    All,
}

impl Command {
    fn stage(self) -> Option<Stage> {
        Some(match self {
            Command::Gen => Stage::Gen,
            Command::Cluster => Stage::Cluster,
            Command::Extract => Stage::Extract,
            Command::Rank => Stage::Rank,
            Command::Select => Stage::Select,
            Command::Train => Stage::Train,
            Command::Sweep => Stage::Sweep,
            Command::Eval => Stage::Eval,
            Command::Report => Stage::Report,
            Command::All => return None,
        })
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RunConfig::default(),
    }
    .resolve(cli.seed)?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build()?;
    let pipeline = Pipeline::new(config, out, cli.force);
    let done = pool.install(|| match cli.command.stage() {
        Some(stage) => pipeline.run(stage).map(|o| vec![(stage, o)]),
        None => pipeline.run_all(),
    })?;
    for (stage, outcome) in done {
        let what = match outcome {
            Outcome::Ran => "done",
            Outcome::Skipped => "up to date",
        };
        eprintln!("{stage}: {what}");
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
