use std::fs;
use std::path::{Path, PathBuf};

use super::{FeatureScore, SelectionReport};
use crate::error::{Error, Result};
use crate::io::{read_json, write_json};

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let to_io = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(to_io)?;
    w.write_record(header).map_err(to_io)?;
    for r in rows {
        w.write_record(&r).map_err(to_io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Top lists side by side: rank, then feature and score for each method.
pub fn write_top_table(report: &SelectionReport, path: &Path) -> Result<()> {
    let mut header = vec!["rank".to_string()];
    for m in &report.methods {
        header.push(m.method.clone());
        header.push(format!("{}_score", m.method));
    }
    let depth = report.methods.iter().map(|m| m.top.len()).max().unwrap_or(0);
    let rows = (0..depth).map(|i| {
        let mut r = vec![(i + 1).to_string()];
        for m in &report.methods {
            match m.top.get(i) {
                Some(f) => {
                    r.push(f.name.clone());
                    r.push(f.score.to_string());
                }
                None => r.extend([String::new(), String::new()]),
            }
        }
        r
    });
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_rows(path, &header, rows)
}

pub fn write_scores(scores: &[FeatureScore], path: &Path) -> Result<()> {
    write_rows(
        path,
        &["rank", "feature", "score"],
        scores
            .iter()
            .enumerate()
            .map(|(i, f)| vec![(i + 1).to_string(), f.name.clone(), f.score.to_string()]),
    )
}

pub fn write_fused(report: &SelectionReport, path: &Path) -> Result<()> {
    write_rows(
        path,
        &["rank", "feature", "votes", "mean_normalized_score"],
        report
            .fused
            .iter()
            .enumerate()
            .map(|(i, f)| vec![(i + 1).to_string(), f.name.clone(), f.votes.to_string(), f.mean_score.to_string()]),
    )
}

pub fn write_sweep(report: &SelectionReport, path: &Path) -> Result<()> {
    write_rows(
        path,
        &["n_features", "accuracy"],
        report
            .sweep
            .iter()
            .map(|p| vec![p.n_features.to_string(), p.accuracy.to_string()]),
    )
}

/// Writes `selection.json`, `top10.csv`, `fused.csv`, one `scores_<method>.csv`
/// per method and `sweep.csv` when a sweep was run. Returns the paths written.
pub fn write_selection_report(report: &SelectionReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let json = dir.join("selection.json");
    write_json(&json, report)?;
    written.push(json);
    let top = dir.join("top10.csv");
    write_top_table(report, &top)?;
    written.push(top);
    let fused = dir.join("fused.csv");
    write_fused(report, &fused)?;
    written.push(fused);
    for m in &report.methods {
        let p = dir.join(format!("scores_{}.csv", m.method));
        write_scores(&m.ranked, &p)?;
        written.push(p);
    }
    if !report.sweep.is_empty() {
        let p = dir.join("sweep.csv");
        write_sweep(report, &p)?;
        written.push(p);
    }
    Ok(written)
}

pub fn read_selection_report(path: &Path) -> Result<SelectionReport> {
    read_json(path)
}
