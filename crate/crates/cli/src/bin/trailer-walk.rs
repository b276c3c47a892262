use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use trailer_core::evalkit::AnalysisAccumulator;
use trailer_core::ingest::load_bundle;
use trailer_core::pipeline::{evaluate, generate, PreparedMovie, ProposalReport};
use trailer_core::EngineConfig;
use trailer_walk::{analysis_table, emit, evaluation_table, load_corpus, proposals_table, Format};

#[derive(Parser)]
#[command(name = "trailer-walk", version, about = "Generate and evaluate trailer proposals")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Also write the JSON report here.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Walk the shot graph and rank the proposals.
    Generate {
        bundle: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed for start sampling when the bundle has no turning-point scores.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score a proposals report against the bundle's labels.
    Evaluate {
        bundle: PathBuf,
        #[arg(long)]
        proposals: PathBuf,
    },
    /// Corpus statistics over every bundle in a directory.
    Analyze { corpus: PathBuf },
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.output.as_deref();
    match cli.cmd {
        Cmd::Generate { bundle, config, seed } => {
            let cfg = match config {
                Some(p) => EngineConfig::load(&p)?,
                None => EngineConfig::default(),
            };
            let movie = PreparedMovie::new(load_bundle(&bundle)?, &cfg)?;
            let report = generate(&movie, &cfg, seed)?;
            emit(&report, || proposals_table(&report), cli.format, out)
        }
        Cmd::Evaluate { bundle, proposals } => {
            let b = load_bundle(&bundle)?;
            let text = fs::read_to_string(&proposals).with_context(|| format!("reading {}", proposals.display()))?;
            let report: ProposalReport =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", proposals.display()))?;
            let ev = evaluate(&b, &report)?;
            emit(&ev, || evaluation_table(&ev), cli.format, out)
        }
        Cmd::Analyze { corpus } => {
            let bundles = load_corpus(&corpus)?;
            let mut acc = AnalysisAccumulator::new();
            for b in &bundles {
                acc.add(b);
            }
            let report = acc.finish();
            emit(&report, || analysis_table(&report), cli.format, out)
        }
    }
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
