//! File-level stages: synth, extract, select, eval, and the full run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::features::{EpochFeatures, FeatureMatrix};
use crate::io::{load_dataset, write_json};
use crate::learners::report::write_eval_report;
use crate::learners::{run_table4_with_models, EvalReport};
use crate::preprocess::{preprocess_trial, CleaningEntry, EpochIndexEntry, EpochSet};
use crate::selection::report::{read_selection_report, write_selection_report};
use crate::selection::{select, SelectionReport};
use crate::synth::{write_dataset, SynthSpec};

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSummary {
    pub n_trials: usize,
    pub trial_files: Vec<PathBuf>,
}

pub fn cmd_synth(spec: &SynthSpec, out: &Path) -> Result<SynthSummary> {
    let trial_files = write_dataset(spec, out)?;
    Ok(SynthSummary {
        n_trials: trial_files.len(),
        trial_files,
    })
}

/// Cleaning log of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialCleaning {
    pub subject_id: String,
    pub trial_index: u32,
    pub model_type: u8,
    pub entries: Vec<CleaningEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub features: FeatureMatrix<f64>,
    pub epochs: Vec<EpochIndexEntry>,
    pub cleaning: Vec<TrialCleaning>,
}

/// Bandpass, artifact suppression, segmentation and feature extraction over
/// every trial in `dataset`. Rows follow the sorted trial file order.
pub fn extract_dataset(dataset: &Path, cfg: &RunConfig) -> Result<Extracted> {
    cfg.validate()?;
    let recordings = load_dataset::<f64>(dataset)?;
    let first = &recordings[0];
    let (fs, layout) = (first.fs(), first.layout().clone());
    if let Some(r) = recordings.iter().find(|r| r.fs() != fs || r.layout() != &layout) {
        return Err(Error::invalid_data(format!(
            "trial {} of subject {} differs in sampling rate or channel layout from the first trial",
            r.meta().trial_index,
            r.meta().subject_id
        )));
    }
    let band = (cfg.bandpass[0], cfg.bandpass[1]);
    let processed: Vec<(EpochSet<f64>, Vec<CleaningEntry>)> = recordings
        .par_iter()
        .map(|r| preprocess_trial(r, band, &cfg.artifacts, cfg.epoch_s))
        .collect::<Result<_>>()?;
    let mut all = EpochSet::empty(layout.clone(), fs, cfg.epoch_s);
    let mut cleaning = Vec::with_capacity(recordings.len());
    for (r, (set, log)) in recordings.iter().zip(processed) {
        all.extend(set)?;
        cleaning.push(TrialCleaning {
            subject_id: r.meta().subject_id.clone(),
            trial_index: r.meta().trial_index,
            model_type: r.meta().model_type.get(),
            entries: log,
        });
    }
    let extractor = EpochFeatures::new(cfg.feature_config(fs), cfg.channel_mode())?;
    let features = extractor.extract_matrix(&all.epochs, &layout)?;
    Ok(Extracted {
        features,
        epochs: all.index(),
        cleaning,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractOutputs {
    pub features: PathBuf,
    pub epochs: PathBuf,
    pub cleaning_log: PathBuf,
    pub n_rows: usize,
    pub n_columns: usize,
}

/// Writes `features.csv`, `epochs.json` and `cleaning_log.json` into `out`.
pub fn cmd_extract(dataset: &Path, cfg: &RunConfig, out: &Path) -> Result<ExtractOutputs> {
    let ex = extract_dataset(dataset, cfg)?;
    create_dir(out)?;
    let features = out.join("features.csv");
    ex.features.write_csv(&features)?;
    let epochs = out.join("epochs.json");
    write_json(&epochs, &ex.epochs)?;
    let cleaning_log = out.join("cleaning_log.json");
    write_json(&cleaning_log, &ex.cleaning)?;
    Ok(ExtractOutputs {
        features,
        epochs,
        cleaning_log,
        n_rows: ex.features.n_rows(),
        n_columns: ex.features.n_features() + 1,
    })
}

pub fn cmd_select(features: &Path, cfg: &RunConfig, out: &Path) -> Result<(SelectionReport, Vec<PathBuf>)> {
    cfg.validate()?;
    let m = FeatureMatrix::<f64>::read_csv(features)?;
    let report = select(&m, &cfg.selection, cfg.split_fraction, cfg.seed)?;
    let written = write_selection_report(&report, out)?;
    Ok((report, written))
}

/// Runs every configured classifier on all features and on the fused subset,
/// writing reports, confusion matrices and the fitted models into `out`.
pub fn cmd_eval(features: &Path, selection: &Path, cfg: &RunConfig, out: &Path) -> Result<(EvalReport, Vec<PathBuf>)> {
    cfg.validate()?;
    let m = FeatureMatrix::<f64>::read_csv(features)?;
    let sel_report = read_selection_report(selection)?;
    if sel_report.normalizer.names != m.names() {
        return Err(Error::invalid_data(format!(
            "selection report {} was computed on different feature columns than {}",
            selection.display(),
            features.display()
        )));
    }
    let selected = m.select_columns(&sel_report.fused_names())?;
    let (report, models) = run_table4_with_models(&m, &selected, &cfg.classifier_specs(), &cfg.table4_options())?;
    create_dir(out)?;
    let mut written = write_eval_report(&report, out)?;
    let model_dir = out.join("models");
    create_dir(&model_dir)?;
    for model in &models {
        let set = if model.feature_names().len() == m.n_features() { "all" } else { "selected" };
        let p = model_dir.join(format!("{}_{set}.json", model.family()));
        write_json(&p, model)?;
        written.push(p);
    }
    Ok((report, written))
}

/// Text rendering of the accuracy/time table.
pub fn format_table4(report: &EvalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:>12} {:>14} {:>12} {:>14}",
        "classifier", "acc (all)", "time (all) s", "acc (sel)", "time (sel) s"
    );
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{:<14} {:>12.4} {:>14.3e} {:>12.4} {:>14.3e}",
            r.family, r.all.accuracy, r.all.predict_seconds, r.selected.accuracy, r.selected.predict_seconds
        );
    }
    let _ = writeln!(
        s,
        "all = {} features, selected = {} features, {} test rows",
        report.all_features.len(),
        report.selected_features.len(),
        report.split.n_test
    );
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub stage: String,
    pub path: PathBuf,
}

/// Index of everything a full run wrote. The timestamp lives only here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineManifest {
    pub config_hash: String,
    pub seed: u64,
    pub created_unix_s: u64,
    pub artifacts: Vec<ManifestEntry>,
}

impl PipelineManifest {
    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.artifacts.iter().map(|a| a.path.as_path())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub manifest_path: PathBuf,
    pub manifest: PipelineManifest,
    pub selection: SelectionReport,
    pub eval: EvalReport,
}

/// Extract, select and evaluate in sequence; `manifest.json` is written last.
pub fn cmd_run(dataset: &Path, cfg: &RunConfig, out: &Path) -> Result<RunOutputs> {
    cfg.validate()?;
    create_dir(out)?;
    let entry = |stage: &str, path: PathBuf| ManifestEntry {
        stage: stage.into(),
        path,
    };
    let config_path = out.join("config.json");
    cfg.save(&config_path)?;
    let mut artifacts = vec![entry("config", config_path)];

    let ex = cmd_extract(dataset, cfg, &out.join("features")).map_err(Error::in_stage("extract"))?;
    let features = ex.features.clone();
    artifacts.extend([
        entry("extract", ex.features),
        entry("extract", ex.epochs),
        entry("extract", ex.cleaning_log),
    ]);

    let sel_dir = out.join("selection");
    let (selection, written) = cmd_select(&features, cfg, &sel_dir).map_err(Error::in_stage("select"))?;
    artifacts.extend(written.into_iter().map(|p| entry("select", p)));

    let (eval, written) =
        cmd_eval(&features, &sel_dir.join("selection.json"), cfg, &out.join("eval")).map_err(Error::in_stage("eval"))?;
    artifacts.extend(written.into_iter().map(|p| entry("eval", p)));

    let manifest = PipelineManifest {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        created_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        artifacts,
    };
    let manifest_path = out.join("manifest.json");
    write_json(&manifest_path, &manifest)?;
    Ok(RunOutputs {
        manifest_path,
        manifest,
        selection,
        eval,
    })
}
