//! Shared plumbing for the `trailer-walk` and `ingest` binaries.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use trailer_core::evalkit::{AnalysisReport, THEMATIC_UNITS};
use trailer_core::ingest::{load_bundle, to_canonical_json, MovieBundle};
use trailer_core::pipeline::{EvaluationReport, ProposalReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// Writes canonical JSON to `output` when given, and prints either the JSON
/// or the table to stdout.
pub fn emit<T: Serialize>(value: &T, table: impl FnOnce() -> String, format: Format, output: Option<&Path>) -> Result<()> {
    let json = to_canonical_json(value)?;
    if let Some(path) = output {
        fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    match format {
        Format::Json => print!("{json}"),
        Format::Table => print!("{}", table()),
    }
    Ok(())
}

/// Plain-text table with left-aligned columns.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(ToString::to_string).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        self.rows.push(cells);
        self
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate().take(cols) {
                if i > 0 {
                    s.push_str("  ");
                }
                let _ = write!(s, "{c:<w$}", w = width[i]);
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        out.push_str(&(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n"));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

pub fn proposals_table(report: &ProposalReport) -> String {
    let mut t = Table::new(&["rank", "start", "mean score", "TPs", "end", "shots"]);
    for (rank, &i) in report.ranking.iter().enumerate() {
        let p = &report.proposals[i];
        let shots: Vec<String> = p.shots().iter().map(ToString::to_string).collect();
        let end = p
            .terminated_reason
            .and_then(|r| serde_json::to_value(r).ok())
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let dup = p.duplicate_of.map(|d| format!(" (tail of #{d})")).unwrap_or_default();
        t.row(vec![
            (rank + 1).to_string(),
            p.start.to_string(),
            format!("{:.4}", p.mean_score()),
            format!("{:?}", p.tps_covered),
            end,
            shots.join(" ") + &dup,
        ]);
    }
    format!("movie {} ({:?} starts)\n{}", report.movie_id, report.mode, t.render())
}

pub fn evaluation_table(ev: &EvaluationReport) -> String {
    let mut t = Table::new(&["start", "accuracy %", "TPs", "shots"]);
    for p in &ev.proposals {
        let shots: Vec<String> = p.shots.iter().map(ToString::to_string).collect();
        t.row(vec![
            p.start.to_string(),
            fmt_opt(p.accuracy),
            format!("{:?}", p.tps_covered),
            shots.join(" "),
        ]);
    }
    let mut out = format!("movie {}\n{}", ev.movie_id, t.render());
    let _ = writeln!(out, "accuracy (top proposal): {}", fmt_opt(ev.accuracy_best));
    let _ = writeln!(out, "PA@5: {}  PA@10: {}", fmt_opt(ev.pa_at_5), fmt_opt(ev.pa_at_10));
    let _ = writeln!(out, "overlap: {}  [{}]", fmt_opt(ev.overlap_upper_bound), ev.overlap_definition);
    for o in &ev.omissions {
        let _ = writeln!(out, "omitted: {o}");
    }
    out
}

pub fn analysis_table(r: &AnalysisReport) -> String {
    let mut out = format!("{} movies, {} trailers\n", r.movies, r.trailers);
    let mut t = Table::new(&["thematic unit", "% trailer shots"]);
    for (i, name) in THEMATIC_UNITS.iter().enumerate() {
        t.row(vec![name.to_string(), fmt_opt(r.thematic_units.map(|u| u[i]))]);
    }
    out.push_str(&t.render());
    let mut t = Table::new(&["TP", "% trailers covering"]);
    for i in 0..5 {
        t.row(vec![format!("TP{}", i + 1), fmt_opt(r.tp_coverage.and_then(|c| c[i]))]);
    }
    out.push_str(&t.render());
    let thirds = r.sentiment_thirds;
    let _ = writeln!(
        out,
        "mean |sentiment| per third: {} / {} / {}",
        fmt_opt(thirds.map(|m| m[0])),
        fmt_opt(thirds.map(|m| m[1])),
        fmt_opt(thirds.map(|m| m[2]))
    );
    let _ = writeln!(out, "V-shaped trailers %: {}", fmt_opt(r.v_shape));
    for o in &r.omissions {
        let _ = writeln!(out, "omitted: {o}");
    }
    out
}

/// Every `*.json` bundle directly inside `dir`, in file-name order.
pub fn load_corpus(dir: &Path) -> Result<Vec<MovieBundle>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .par_iter()
        .map(|p| load_bundle(p).with_context(|| format!("loading {}", p.display())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_columns() {
        let mut t = Table::new(&["a", "bbb"]);
        t.row(vec!["long".into(), "x".into()]);
        assert_eq!(t.render(), "a     bbb\n----  ---\nlong  x\n");
    }

    #[test]
    fn missing_values_render_as_dash() {
        assert_eq!(fmt_opt(None), "-");
        assert_eq!(fmt_opt(Some(66.666)), "66.67");
    }
}
