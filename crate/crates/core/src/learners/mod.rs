//! The six classifier families, evaluation and the all-vs-selected comparison.

mod common;
pub mod decision_tree;
pub mod eval;
pub mod gbt;
pub mod knn;
pub mod mlp;
pub mod naive_bayes;
pub mod report;
pub mod split;
pub mod svm;
pub mod table4;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use common::{argmax, gather_rows, gini, ClassIndex};
pub use decision_tree::{DecisionTree, DecisionTreeParams};
pub use eval::{evaluate, ConfusionMatrix, EvalEntry};
pub use gbt::{Gbt, GbtParams};
pub use knn::{Knn, KnnParams};
pub use mlp::{Mlp, MlpParams, MlpShape};
pub use naive_bayes::{GaussianNb, GaussianNbParams};
pub use split::{split, stratified_indices, SplitDescription, SplitIndices};
pub use svm::{LinearSvm, LinearSvmParams};
pub use table4::{run_table4, run_table4_with_models, EvalReport, Table4Options, Table4Row};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Label};
use crate::scalar::Scalar;

/// Family plus its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "hyperparameters", rename_all = "snake_case")]
pub enum ClassifierParams {
    GaussianNb(GaussianNbParams),
    DecisionTree(DecisionTreeParams),
    LinearSvm(LinearSvmParams),
    Knn(KnnParams),
    Mlp(MlpParams),
    Gbt(GbtParams),
}

impl ClassifierParams {
    pub fn family(&self) -> &'static str {
        match self {
            Self::GaussianNb(_) => "gaussian_nb",
            Self::DecisionTree(_) => "decision_tree",
            Self::LinearSvm(_) => "linear_svm",
            Self::Knn(_) => "knn",
            Self::Mlp(_) => "mlp",
            Self::Gbt(_) => "gbt",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::GaussianNb(p) => p.validate(),
            Self::DecisionTree(p) => p.validate(),
            Self::LinearSvm(p) => p.validate(),
            Self::Knn(p) => p.validate(),
            Self::Mlp(p) => p.validate(),
            Self::Gbt(p) => p.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    #[serde(flatten)]
    pub params: ClassifierParams,
    #[serde(default)]
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(params: ClassifierParams, seed: u64) -> Self {
        Self { params, seed }
    }

    pub fn family(&self) -> &'static str {
        self.params.family()
    }

    /// The six families with default hyperparameters.
    pub fn defaults(seed: u64) -> Vec<Self> {
        vec![
            Self::new(ClassifierParams::GaussianNb(GaussianNbParams::default()), seed),
            Self::new(ClassifierParams::DecisionTree(DecisionTreeParams::default()), seed),
            Self::new(ClassifierParams::LinearSvm(LinearSvmParams::default()), seed),
            Self::new(ClassifierParams::Knn(KnnParams::default()), seed),
            Self::new(ClassifierParams::Mlp(MlpParams::default()), seed),
            Self::new(ClassifierParams::Gbt(GbtParams::default()), seed),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "model", rename_all = "snake_case", bound = "T: Scalar")]
pub enum FittedModel<T> {
    GaussianNb(GaussianNb<T>),
    DecisionTree(DecisionTree<T>),
    LinearSvm(LinearSvm<T>),
    Knn(Knn<T>),
    Mlp(Mlp<T>),
    Gbt(Gbt<T>),
}

impl<T: Scalar> FittedModel<T> {
    fn predict_row(&self, row: &[T]) -> Label {
        match self {
            Self::GaussianNb(m) => m.predict_row(row),
            Self::DecisionTree(m) => m.predict_row(row),
            Self::LinearSvm(m) => m.predict_row(row),
            Self::Knn(m) => m.predict_row(row),
            Self::Mlp(m) => m.predict_row(row),
            Self::Gbt(m) => m.predict_row(row),
        }
    }
}

/// A fitted classifier bound to the feature names it was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrainedModel<T> {
    family: String,
    feature_names: Vec<String>,
    classes: Vec<Label>,
    model: FittedModel<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub labels: Vec<Label>,
    pub elapsed_s: f64,
}

pub fn fit<T: Scalar>(spec: &ClassifierSpec, train: &FeatureMatrix<T>) -> Result<TrainedModel<T>> {
    spec.params.validate()?;
    if train.is_empty() {
        return Err(Error::invalid_data("cannot fit on an empty matrix"));
    }
    if train.n_features() == 0 {
        return Err(Error::invalid_data("cannot fit on a matrix without features"));
    }
    gather_rows(train.rows(), train.n_features())?;
    let classes = ClassIndex::fit(train.labels())?;
    let (x, y) = (train.rows(), train.labels());
    let model = match &spec.params {
        ClassifierParams::GaussianNb(p) => FittedModel::GaussianNb(GaussianNb::fit(x, y, p)?),
        ClassifierParams::DecisionTree(p) => FittedModel::DecisionTree(DecisionTree::fit(x, y, p)?),
        ClassifierParams::LinearSvm(p) => FittedModel::LinearSvm(LinearSvm::fit(x, y, p)?),
        ClassifierParams::Knn(p) => FittedModel::Knn(Knn::fit(x, y, p)?),
        ClassifierParams::Mlp(p) => FittedModel::Mlp(Mlp::fit(x, y, p, spec.seed)?),
        ClassifierParams::Gbt(p) => FittedModel::Gbt(Gbt::fit(x, y, p, spec.seed)?),
    };
    Ok(TrainedModel {
        family: spec.family().to_string(),
        feature_names: train.names().to_vec(),
        classes: classes.classes().to_vec(),
        model,
    })
}

impl<T: Scalar> TrainedModel<T> {
    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn model(&self) -> &FittedModel<T> {
        &self.model
    }

    /// Labels for every row; `elapsed_s` covers input validation and the
    /// prediction loop, not the name check.
    pub fn predict(&self, m: &FeatureMatrix<T>) -> Result<Prediction> {
        if m.n_features() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                actual: m.n_features(),
            });
        }
        if m.names() != self.feature_names.as_slice() {
            return Err(Error::invalid_data("feature names differ from the training matrix"));
        }
        let d = self.feature_names.len();
        let start = Instant::now();
        let flat = gather_rows(m.rows(), d)?;
        let labels: Vec<Label> = flat.chunks_exact(d).map(|r| self.model.predict_row(r)).collect();
        let elapsed_s = start.elapsed().as_secs_f64();
        Ok(Prediction { labels, elapsed_s })
    }
}
