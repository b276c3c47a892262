use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use trailer_core::ingest::{dtw_align, load_bundle, save_bundle, silver_matches, synthetic_bundle, MovieBundle};
use trailer_walk::{emit, Format, Table};

#[derive(Parser)]
#[command(name = "ingest", version, about = "Validate and prepare movie bundles")]
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
    /// Check a bundle against the schema and its invariants.
    Validate { file: PathBuf },
    /// Silver trailer labels from the bundle's trailer shots.
    Label {
        bundle: PathBuf,
        /// Minimum cosine similarity for a trailer shot to be mapped.
        #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
        threshold: Option<f64>,
        /// Report label counts for several thresholds instead.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
        /// Save the labelled bundle here.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Align scenes (mean sentence embedding) with shots by DTW.
    Align {
        bundle: PathBuf,
        /// Save the bundle with the derived shot-to-scene mapping here.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Write a seeded synthetic bundle.
    Synth {
        out: PathBuf,
        #[arg(long, default_value = "synthetic")]
        movie_id: String,
        #[arg(long, default_value_t = 60)]
        shots: usize,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct Summary<'a> {
    movie_id: &'a str,
    dim: usize,
    shots: usize,
    tp_scores: bool,
    silver_labels: bool,
    scenes: usize,
    trailer_shots: usize,
    notes: &'a [String],
}

#[derive(Serialize)]
struct LabelRun {
    threshold: f64,
    positives: usize,
    trailer_shots: usize,
    dropped: usize,
    positive_shots: Vec<usize>,
}

#[derive(Serialize)]
struct Alignment {
    total_cost: f64,
    path: Vec<(usize, usize)>,
    shot_to_scene: Vec<usize>,
}

fn label_run(b: &MovieBundle, threshold: f64) -> Result<LabelRun> {
    let Some(trailer) = &b.trailer_shots else {
        bail!("bundle {} has no trailer_shots", b.movie_id);
    };
    let t: Vec<&[f64]> = trailer.iter().map(|s| s.embedding.as_slice()).collect();
    let matches = silver_matches(&b.embeddings(), &t, threshold)?;
    let mut positive_shots: Vec<usize> = matches.iter().flatten().copied().collect();
    positive_shots.sort_unstable();
    positive_shots.dedup();
    Ok(LabelRun {
        threshold,
        positives: positive_shots.len(),
        trailer_shots: t.len(),
        dropped: matches.iter().filter(|m| m.is_none()).count(),
        positive_shots,
    })
}

fn label_table(runs: &[LabelRun]) -> String {
    let mut t = Table::new(&["threshold", "positive shots", "dropped trailer shots"]);
    for r in runs {
        t.row(vec![
            format!("{:.3}", r.threshold),
            r.positives.to_string(),
            format!("{}/{}", r.dropped, r.trailer_shots),
        ]);
    }
    t.render()
}

fn align(b: &MovieBundle) -> Result<Alignment> {
    let Some(scenes) = &b.scenes else {
        bail!("bundle {} has no scenes", b.movie_id);
    };
    let mut means = Vec::with_capacity(scenes.len());
    for s in scenes {
        if s.sentences.is_empty() {
            bail!("scene {} has no sentence embeddings", s.id);
        }
        let dim = s.sentences[0].len();
        if s.sentences.iter().any(|x| x.len() != dim) || dim != b.dim {
            bail!("scene {} sentence embeddings must all have dimension {}", s.id, b.dim);
        }
        let mut m = vec![0.0; dim];
        for x in &s.sentences {
            for (o, v) in m.iter_mut().zip(x) {
                *o += v / s.sentences.len() as f64;
            }
        }
        means.push(m);
    }
    let r = dtw_align(&means, &b.embeddings())?;
    let mut shot_to_scene = vec![usize::MAX; b.n_shots()];
    for &(scene, shot) in &r.path {
        if shot_to_scene[shot] == usize::MAX {
            shot_to_scene[shot] = scene;
        }
    }
    Ok(Alignment {
        total_cost: r.total_cost,
        path: r.path,
        shot_to_scene,
    })
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.output.as_deref();
    match cli.cmd {
        Cmd::Validate { file } => {
            let b = load_bundle(&file)?;
            let s = Summary {
                movie_id: &b.movie_id,
                dim: b.dim,
                shots: b.n_shots(),
                tp_scores: b.has_tp_scores(),
                silver_labels: b.trailer_labels().is_some(),
                scenes: b.scenes.as_ref().map_or(0, Vec::len),
                trailer_shots: b.trailer_shots.as_ref().map_or(0, Vec::len),
                notes: &b.notes,
            };
            let table = || {
                let mut t = format!("{}: ok\n", s.movie_id);
                let _ = writeln!(t, "  shots {} (dim {}), scenes {}, trailer shots {}", s.shots, s.dim, s.scenes, s.trailer_shots);
                let _ = writeln!(t, "  tp scores: {}, silver labels: {}", s.tp_scores, s.silver_labels);
                t
            };
            emit(&s, table, cli.format, out)
        }
        Cmd::Label {
            bundle,
            threshold,
            sweep,
            write,
        } => {
            let mut b = load_bundle(&bundle)?;
            let thresholds = sweep.unwrap_or_else(|| threshold.into_iter().collect());
            let runs = thresholds.iter().map(|&t| label_run(&b, t)).collect::<Result<Vec<_>>>()?;
            if let Some(path) = write {
                if runs.len() != 1 {
                    bail!("--write needs a single --threshold");
                }
                for s in &mut b.shots {
                    s.is_trailer = Some(runs[0].positive_shots.binary_search(&s.id).is_ok());
                }
                save_bundle(&b, &path)?;
            }
            emit(&runs, || label_table(&runs), cli.format, out)
        }
        Cmd::Align { bundle, write } => {
            let mut b = load_bundle(&bundle)?;
            let a = align(&b)?;
            if let Some(path) = write {
                b.shot_to_scene = Some(a.shot_to_scene.clone());
                save_bundle(&b, &path)?;
            }
            let table = || {
                let mut t = Table::new(&["shot", "scene"]);
                for (shot, scene) in a.shot_to_scene.iter().enumerate() {
                    t.row(vec![shot.to_string(), scene.to_string()]);
                }
                format!("total cost {:.6}\n{}", a.total_cost, t.render())
            };
            emit(&a, table, cli.format, out)
        }
        Cmd::Synth {
            out: path,
            movie_id,
            shots,
            dim,
            seed,
        } => {
            if shots < 2 || dim == 0 {
                bail!("need --shots >= 2 and --dim >= 1");
            }
            let b = synthetic_bundle(&movie_id, shots, dim, seed);
            save_bundle(&b, &path)?;
            Ok(())
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
