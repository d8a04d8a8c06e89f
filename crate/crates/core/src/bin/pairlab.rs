use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pairlab::counting::CountsMode;
use pairlab::pipeline::{
    cmd_analyze, cmd_pipeline, cmd_simulate, report_files, AnalysisKind, Campaign, ModelSpec, Overrides,
    PipelineConfig,
};
use pairlab::{Error, Result};

#[derive(Parser)]
#[command(name = "pairlab", version, about = "Simulate and analyze photon-pair polarization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write histogram CSVs, record JSON and a manifest.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        campaign: Option<String>,
    },
    /// Analyze histogram CSV files or directories.
    Analyze {
        #[arg(long)]
        kind: String,
        #[arg(long, value_parser = parse_mode, default_value = "net")]
        mode: CountsMode,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Simulate and analyze a tomography campaign.
    Tomo(RunArgs),
    /// Simulate and analyze a CHSH campaign.
    Chsh(RunArgs),
    /// Simulate and analyze a visibility sweep.
    Visibility(RunArgs),
    /// Simulate and analyze every configured campaign.
    Pipeline {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        campaign: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// `paper-reference` or a model JSON file.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<CountsMode>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dry_run: bool,
}

fn parse_mode(s: &str) -> std::result::Result<CountsMode, String> {
    match s {
        "raw" => Ok(CountsMode::Raw),
        "net" => Ok(CountsMode::Net),
        _ => Err(format!("expected raw or net, got `{s}`")),
    }
}

fn config(run: &RunArgs, campaign: Option<Campaign>) -> Result<PipelineConfig> {
    let base = match &run.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    base.with_overrides(Overrides {
        model: run.model.as_deref().map(ModelSpec::parse_arg).transpose()?,
        campaign,
        seed: run.seed,
        counts_mode: run.mode,
        output_dir: run.out.clone(),
    })
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn pipeline(run: &RunArgs, campaign: Option<Campaign>) -> Result<String> {
    let cfg = config(run, campaign)?;
    let (manifest, summary) = cmd_pipeline(&cfg, run.dry_run)?;
    if run.dry_run {
        json(&manifest)
    } else {
        json(&summary)
    }
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Simulate { run, campaign } => {
            let campaign = campaign.map(|c| c.parse()).transpose()?;
            json(&cmd_simulate(&config(&run, campaign)?, run.dry_run)?)
        }
        Command::Analyze { kind, mode, out, inputs } => {
            let kind: AnalysisKind = kind.parse()?;
            let analysis = cmd_analyze(kind, &inputs, mode, out.as_deref())?;
            let (_, report) = report_files(&analysis)?.swap_remove(0);
            Ok(report.trim_end().to_string())
        }
        Command::Tomo(run) => pipeline(&run, Some(Campaign::Tomography)),
        Command::Chsh(run) => pipeline(&run, Some(Campaign::Chsh)),
        Command::Visibility(run) => pipeline(&run, Some(Campaign::VisibilitySweep)),
        Command::Pipeline { run, campaign } => {
            let campaign = campaign.map(|c| c.parse()).transpose()?;
            pipeline(&run, campaign)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let err: &Error = &e;
            let body = serde_json::json!({ "error": err.kind(), "message": err.to_string() });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
