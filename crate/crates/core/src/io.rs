//! Trial files: one CSV of samples (header = channel names, one row per
//! sample, microvolts) next to a JSON manifest with the trial metadata.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelLayout, ModelType, Recording, TrialMeta};
use crate::scalar::Scalar;

/// JSON sidecar describing one trial CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialManifest {
    pub subject_id: String,
    pub trial_index: u32,
    pub model_type: u8,
    pub fs: i64,
    pub idle_head_s: f64,
    pub task_s: f64,
    pub idle_tail_s: f64,
    /// Column order of the loaded recording; the CSV header order when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<String>>,
}

impl TrialManifest {
    pub fn for_recording<T: Scalar>(r: &Recording<T>) -> Self {
        let m = r.meta();
        Self {
            subject_id: m.subject_id.clone(),
            trial_index: m.trial_index,
            model_type: m.model_type.get(),
            fs: i64::from(r.fs()),
            idle_head_s: m.idle_head_s,
            task_s: m.task_s,
            idle_tail_s: m.idle_tail_s,
            channels: Some(r.layout().names().to_vec()),
        }
    }

    fn meta(&self) -> Result<TrialMeta> {
        Ok(TrialMeta {
            subject_id: self.subject_id.clone(),
            trial_index: self.trial_index,
            model_type: ModelType::new(self.model_type)?,
            idle_head_s: self.idle_head_s,
            task_s: self.task_s,
            idle_tail_s: self.idle_tail_s,
        })
    }
}

pub fn read_manifest(path: &Path) -> Result<TrialManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a trial CSV and its manifest.
pub fn load_recording<T: Scalar>(csv_path: &Path, manifest_path: &Path) -> Result<Recording<T>> {
    let manifest = read_manifest(manifest_path)?;
    if manifest.fs <= 0 || manifest.fs > i64::from(u32::MAX) {
        return Err(Error::Parse {
            path: manifest_path.to_path_buf(),
            line: 1,
            column: Some("fs".into()),
            message: format!("sampling rate must be a positive integer, got {}", manifest.fs),
        });
    }
    let fs = manifest.fs as u32;
    let meta = manifest.meta().map_err(|e| Error::Parse {
        path: manifest_path.to_path_buf(),
        line: 1,
        column: Some("model_type".into()),
        message: e.to_string(),
    })?;

    let parse_err = |line: usize, column: Option<String>, message: String| Error::Parse {
        path: csv_path.to_path_buf(),
        line,
        column,
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(csv_path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(csv_path, io),
            other => parse_err(1, None, format!("{other:?}")),
        })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(1, None, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    for (i, name) in header.iter().enumerate() {
        if name.is_empty() {
            return Err(parse_err(1, Some(format!("#{}", i + 1)), "empty channel name".into()));
        }
        if header[..i].contains(name) {
            return Err(parse_err(1, Some(name.clone()), "duplicate channel column".into()));
        }
    }

    let layout_names = manifest.channels.clone().unwrap_or_else(|| header.clone());
    let layout = ChannelLayout::new(layout_names.clone()).map_err(|e| Error::Parse {
        path: manifest_path.to_path_buf(),
        line: 1,
        column: Some("channels".into()),
        message: e.to_string(),
    })?;
    let mut source_col = Vec::with_capacity(layout.len());
    for name in layout.names() {
        match header.iter().position(|h| h == name) {
            Some(i) => source_col.push(i),
            None => return Err(parse_err(1, Some(name.clone()), "missing channel column".into())),
        }
    }

    let mut channels: Vec<Vec<T>> = vec![Vec::new(); layout.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, None, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                None,
                format!("row has {} values, header has {}", record.len(), header.len()),
            ));
        }
        for (c, &src) in source_col.iter().enumerate() {
            let cell = &record[src];
            let v: T = cell.parse().map_err(|_| {
                parse_err(line, Some(header[src].clone()), format!("non-numeric value {cell:?}"))
            })?;
            if !v.is_finite() {
                return Err(parse_err(line, Some(header[src].clone()), format!("non-finite value {cell:?}")));
            }
            channels[c].push(v);
        }
    }
    if channels[0].is_empty() {
        return Err(parse_err(2, None, "no sample rows".into()));
    }
    Recording::from_channels(layout, fs, channels, meta)
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`; returns both paths.
///
/// Values are written with the shortest representation that parses back to
/// the identical float.
pub fn write_recording<T: Scalar>(r: &Recording<T>, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    let file = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(&csv_path, e);
    writeln!(w, "{}", r.layout().names().join(",")).map_err(io)?;
    let mut line = String::new();
    for t in 0..r.n_samples() {
        line.clear();
        for c in 0..r.n_channels() {
            if c > 0 {
                line.push(',');
            }
            use std::fmt::Write as _;
            let _ = write!(line, "{}", r.sample(t, c));
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)?;
    write_json(&json_path, &TrialManifest::for_recording(r))?;
    Ok((csv_path, json_path))
}

/// CSV/manifest pairs in a dataset directory, sorted by file stem.
pub fn dataset_trials(dir: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut pairs = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let manifest = path.with_extension("json");
            if !manifest.is_file() {
                return Err(Error::invalid_data(format!(
                    "{} has no manifest {}",
                    path.display(),
                    manifest.display()
                )));
            }
            pairs.push((path, manifest));
        }
    }
    if pairs.is_empty() {
        return Err(Error::invalid_data(format!("{} contains no trial CSV files", dir.display())));
    }
    pairs.sort();
    Ok(pairs)
}

pub fn load_dataset<T: Scalar>(dir: &Path) -> Result<Vec<Recording<T>>> {
    use rayon::prelude::*;
    dataset_trials(dir)?
        .par_iter()
        .map(|(csv, json)| load_recording(csv, json))
        .collect()
}

pub(crate) fn write_json<S: Serialize + ?Sized>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_json<S: serde::de::DeserializeOwned>(path: &Path) -> Result<S> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
