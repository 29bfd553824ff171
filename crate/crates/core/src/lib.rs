//! EEG mental-workload pipeline: bandpass and artifact suppression, epoching,
//! a 52-feature extractor, three feature selectors and six classifier families.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! name the common concrete types.

pub mod config;
pub mod error;
pub mod features;
pub mod io;
pub mod learners;
pub mod model;
pub mod pipeline;
pub mod preprocess;
pub mod scalar;
pub mod selection;
pub mod synth;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use features::{FeatureMatrix, Label};
pub use model::{ChannelLayout, Epoch, ModelType, Recording, TrialMeta};
pub use scalar::Scalar;

pub type RecordingF32 = model::Recording<f32>;
pub type RecordingF64 = model::Recording<f64>;
pub type EpochF64 = model::Epoch<f64>;
pub type FeatureMatrixF32 = features::FeatureMatrix<f32>;
pub type FeatureMatrixF64 = features::FeatureMatrix<f64>;
pub type TrainedModelF64 = learners::TrainedModel<f64>;
