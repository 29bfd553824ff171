//! Kept in its own test binary so no other test competes for the CPU while
//! prediction is being timed.

use eegflow::learners::{run_table4, ClassifierSpec, Table4Options};
use eegflow::{FeatureMatrix, Label};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Three classes; the first `informative` columns shift with the class,
/// the rest are pure noise.
fn blobs(n: usize, d: usize, informative: usize, seed: u64) -> FeatureMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % 3) as Label + 1;
        let row = (0..d)
            .map(|j| {
                let shift = if j < informative { 1.2 * f64::from(label) * if j % 2 == 0 { 1.0 } else { -0.7 } } else { 0.0 };
                shift + noise.sample(&mut rng)
            })
            .collect();
        rows.push(row);
        labels.push(label);
    }
    FeatureMatrix::new((0..d).map(|j| format!("x{j}")).collect(), rows, labels).unwrap()
}

#[test]
fn fewer_features_predict_no_slower() {
    let all = blobs(5600, 52, 8, 2);
    let keep: Vec<usize> = (0..14).collect();
    let selected = all.select_column_indices(&keep).unwrap();
    let opts = Table4Options {
        test_fraction: 0.9,
        seed: 1,
        timing_repeats: 7,
        normalize: true,
    };
    let report = run_table4(&all, &selected, &ClassifierSpec::defaults(0), &opts).unwrap();
    assert!(report.split.n_test >= 5000, "{}", report.split.n_test);
    for r in &report.rows {
        assert!(
            r.selected.predict_seconds <= r.all.predict_seconds,
            "{}: {} s with 14 features vs {} s with 52",
            r.family,
            r.selected.predict_seconds,
            r.all.predict_seconds
        );
    }
}
