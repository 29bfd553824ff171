use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::split::{stratified_indices, SplitDescription};
use super::{evaluate, fit, ClassifierSpec, EvalEntry, TrainedModel};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::scalar::Scalar;
use crate::selection::Normalizer;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table4Options {
    pub test_fraction: f64,
    pub seed: u64,
    pub timing_repeats: usize,
    /// Fit a mean normalizer on each training split before fitting models.
    pub normalize: bool,
}

impl Default for Table4Options {
    fn default() -> Self {
        Self {
            test_fraction: 0.2,
            seed: 0,
            timing_repeats: 5,
            normalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table4Row {
    pub family: String,
    pub all: EvalEntry,
    pub selected: EvalEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub split: SplitDescription,
    pub confusion_orientation: String,
    pub time_column: String,
    pub all_features: Vec<String>,
    pub selected_features: Vec<String>,
    pub rows: Vec<Table4Row>,
}

impl EvalReport {
    pub fn row(&self, family: &str) -> Option<&Table4Row> {
        self.rows.iter().find(|r| r.family == family)
    }

    /// Copy with all wall-times zeroed, for comparing runs.
    pub fn without_times(&self) -> Self {
        let mut r = self.clone();
        for row in &mut r.rows {
            row.all.predict_seconds = 0.0;
            row.selected.predict_seconds = 0.0;
        }
        r
    }
}

fn prepare<T: Scalar>(m: &FeatureMatrix<T>, train: &[usize], test: &[usize], normalize: bool) -> Result<(FeatureMatrix<T>, FeatureMatrix<T>)> {
    let (tr, te) = (m.subset_rows(train), m.subset_rows(test));
    if !normalize {
        return Ok((tr, te));
    }
    let n = Normalizer::fit(&tr)?;
    Ok((n.apply(&tr)?, n.apply(&te)?))
}

/// Fits and evaluates every spec on both matrices with one shared stratified split.
/// Fitting runs in parallel; timing runs afterwards on the calling thread.
pub fn run_table4<T: Scalar>(
    all: &FeatureMatrix<T>,
    selected: &FeatureMatrix<T>,
    specs: &[ClassifierSpec],
    opts: &Table4Options,
) -> Result<EvalReport> {
    run_table4_with_models(all, selected, specs, opts).map(|(r, _)| r)
}

/// As [`run_table4`], also returning the fitted models as
/// `[spec0 all, spec0 selected, spec1 all, ...]`.
pub fn run_table4_with_models<T: Scalar>(
    all: &FeatureMatrix<T>,
    selected: &FeatureMatrix<T>,
    specs: &[ClassifierSpec],
    opts: &Table4Options,
) -> Result<(EvalReport, Vec<TrainedModel<T>>)> {
    if all.n_rows() != selected.n_rows() || all.labels() != selected.labels() {
        return Err(Error::invalid_data("all-feature and selected-feature matrices have different rows"));
    }
    if let Some(missing) = selected.names().iter().find(|n| all.column_index(n).is_none()) {
        return Err(Error::invalid_data(format!("selected feature {missing} is not among all features")));
    }
    if specs.is_empty() {
        return Err(Error::invalid_arg("no classifier specs given"));
    }
    let s = stratified_indices(all.labels(), opts.test_fraction, opts.seed)?;
    let (all_tr, all_te) = prepare(all, &s.train, &s.test, opts.normalize)?;
    let (sel_tr, sel_te) = prepare(selected, &s.train, &s.test, opts.normalize)?;
    let jobs: Vec<(usize, bool)> = (0..specs.len()).flat_map(|i| [(i, false), (i, true)]).collect();
    let models: Vec<TrainedModel<T>> = jobs
        .par_iter()
        .map(|&(i, sel)| fit(&specs[i], if sel { &sel_tr } else { &all_tr }))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let all_entry = evaluate(&models[2 * i], &all_te, "all", opts.timing_repeats)?;
        let sel_entry = evaluate(&models[2 * i + 1], &sel_te, "selected", opts.timing_repeats)?;
        rows.push(Table4Row {
            family: spec.family().to_string(),
            all: all_entry,
            selected: sel_entry,
        });
    }
    let report = EvalReport {
        split: SplitDescription {
            test_fraction: opts.test_fraction,
            seed: opts.seed,
            stratified: true,
            n_train: s.train.len(),
            n_test: s.test.len(),
        },
        confusion_orientation: "rows = predicted class, columns = actual class".into(),
        time_column: "prediction wall-time in seconds over the test rows, training excluded".into(),
        all_features: all.names().to_vec(),
        selected_features: selected.names().to_vec(),
        rows,
    };
    Ok((report, models))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{ClassifierParams, KnnParams};

    fn data() -> FeatureMatrix<f64> {
        let rows: Vec<Vec<f64>> = (0..90)
            .map(|i| vec![(i % 3) as f64 + 0.1 * ((i * 7) % 5) as f64, ((i * 13) % 11) as f64, (i % 3) as f64 * 2.0])
            .collect();
        let labels = (0..90).map(|i| (i % 3) as u32 + 1).collect();
        FeatureMatrix::new(vec!["a".into(), "b".into(), "c".into()], rows, labels).unwrap()
    }

    #[test]
    fn shape_and_reproducibility() {
        let all = data();
        let sel = all.select_columns(&["a", "c"]).unwrap();
        let specs = vec![
            ClassifierSpec::new(ClassifierParams::Knn(KnnParams::default()), 0),
            ClassifierSpec::defaults(0).remove(0),
        ];
        let opts = Table4Options {
            timing_repeats: 1,
            ..Default::default()
        };
        let a = run_table4(&all, &sel, &specs, &opts).unwrap();
        assert_eq!(a.rows.len(), 2);
        assert_eq!(a.split.n_test, 18);
        for r in &a.rows {
            assert_eq!(r.all.confusion.total(), 18);
            assert_eq!(r.selected.n_features, 2);
        }
        let b = run_table4(&all, &sel, &specs, &opts).unwrap();
        assert_eq!(a.without_times(), b.without_times());
    }

    #[test]
    fn selected_must_be_subset() {
        let all = data();
        let mut sel = all.select_columns(&["a"]).unwrap();
        sel = FeatureMatrix::new(vec!["zzz".into()], sel.rows().to_vec(), sel.labels().to_vec()).unwrap();
        assert!(run_table4(&all, &sel, &ClassifierSpec::defaults(0), &Table4Options::default()).is_err());
        let fewer = all.subset_rows(&[0, 1, 2]);
        assert!(run_table4(&all, &fewer, &ClassifierSpec::defaults(0), &Table4Options::default()).is_err());
    }
}
