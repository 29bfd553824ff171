use eegflow::learners::{evaluate, fit, split, ClassifierSpec};
use eegflow::{FeatureMatrix, Label};
use rand::seq::SliceRandom;
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
fn permuting_training_rows_keeps_accuracy() {
    let m = blobs(450, 6, 3, 1);
    let (train, test) = split(&m, 0.2, 3).unwrap();
    let mut order: Vec<usize> = (0..train.n_rows()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    let shuffled = train.subset_rows(&order);
    for mut spec in ClassifierSpec::defaults(5) {
        if let eegflow::learners::ClassifierParams::Mlp(p) = &mut spec.params {
            p.epochs = 60;
        }
        let a = evaluate(&fit(&spec, &train).unwrap(), &test, "all", 1).unwrap().accuracy;
        let b = evaluate(&fit(&spec, &shuffled).unwrap(), &test, "all", 1).unwrap().accuracy;
        match spec.family() {
            "gaussian_nb" | "knn" | "decision_tree" => assert_eq!(a, b, "{}", spec.family()),
            family => assert!((a - b).abs() <= 0.02, "{family}: {a} vs {b}"),
        }
    }
}

#[test]
fn fitted_models_round_trip_through_json() {
    let m = blobs(120, 4, 2, 3);
    for mut spec in ClassifierSpec::defaults(2) {
        if let eegflow::learners::ClassifierParams::Mlp(p) = &mut spec.params {
            p.epochs = 5;
        }
        let model = fit(&spec, &m).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: eegflow::learners::TrainedModel<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.predict(&m).unwrap().labels, model.predict(&m).unwrap().labels, "{}", spec.family());
    }
}
