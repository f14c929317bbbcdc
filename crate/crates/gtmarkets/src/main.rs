//! Thin command-line front end over the pipeline stages.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gtmarkets::pipeline::{
    run_ccf, run_ingest, run_reg, run_report, run_tvp, CliOverrides, PipelineConfig, RegModel,
    StageOutcome,
};
use gtmarkets::timeseries::Source;

#[derive(Parser)]
#[command(
    name = "gtmarkets",
    version,
    about = "Search-attention and market-return analysis pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Pipeline configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Force offline mode (cache/fixtures only).
    #[arg(long)]
    offline: bool,
    /// Standard errors: hc1 or nw.
    #[arg(long, value_name = "KIND")]
    se: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Read raw inputs and persist the aligned panel.
    Ingest(CommonArgs),
    /// Cross-correlation lead-lag table against the reference country.
    Ccf(CommonArgs),
    /// Constant-parameter regressions.
    Reg {
        #[command(flatten)]
        common: CommonArgs,
        /// own_gt, italy_gt, or controls.
        #[arg(long, default_value = "own_gt")]
        model: String,
        /// youtube, news, or search.
        #[arg(long)]
        source: Option<String>,
    },
    /// Time-varying-parameter fits and plot data.
    Tvp {
        #[command(flatten)]
        common: CommonArgs,
        /// youtube, news, or search.
        #[arg(long)]
        source: Option<String>,
    },
    /// Run every stage and write the manifest.
    Report(CommonArgs),
}

fn load_config(common: &CommonArgs) -> gtmarkets::Result<PipelineConfig> {
    let mut config = PipelineConfig::load(&common.config)?;
    config.apply_overrides(&CliOverrides {
        se: common.se.clone(),
        out: common.out.clone(),
        offline: common.offline.then_some(true),
    })?;
    Ok(config)
}

fn pick_source(config: &PipelineConfig, flag: &Option<String>) -> gtmarkets::Result<Source> {
    match flag {
        Some(s) => s.parse(),
        None => Ok(config.primary_source()),
    }
}

fn print_outcome(outcome: &StageOutcome) {
    for artifact in &outcome.artifacts {
        println!("wrote {}", artifact.display());
    }
    for failure in &outcome.failures {
        eprintln!("failed: {failure}");
    }
}

fn run() -> gtmarkets::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Ingest(common) => {
            let config = load_config(&common)?;
            let outcome = run_ingest(&config)?;
            print_outcome(&outcome);
            Ok(outcome.failures.is_empty())
        }
        Command::Ccf(common) => {
            let config = load_config(&common)?;
            let outcome = run_ccf(&config)?;
            print_outcome(&outcome);
            Ok(outcome.failures.is_empty())
        }
        Command::Reg {
            common,
            model,
            source,
        } => {
            let config = load_config(&common)?;
            let model: RegModel = model.parse()?;
            let source = pick_source(&config, &source)?;
            let outcome = run_reg(&config, model, source)?;
            print_outcome(&outcome);
            Ok(outcome.failures.is_empty())
        }
        Command::Tvp { common, source } => {
            let config = load_config(&common)?;
            let source = pick_source(&config, &source)?;
            let outcome = run_tvp(&config, source)?;
            print_outcome(&outcome);
            Ok(outcome.failures.is_empty())
        }
        Command::Report(common) => {
            let config = load_config(&common)?;
            let outcome = run_report(&config)?;
            for artifact in &outcome.artifacts {
                println!("wrote {}", artifact.display());
            }
            println!("wrote {}", outcome.manifest_path.display());
            for failure in &outcome.failures {
                eprintln!("failed: {failure}");
            }
            Ok(outcome.succeeded())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
