//! Analysis toolkit for delta-style debate forums: discussion-tree
//! ingestion, interaction-dynamics statistics, Jaccard-matched paired
//! prediction tasks, opinion-malleability prediction, and the supporting
//! feature extraction, lexicon and model stack.

pub mod corpus;
pub mod dynamics;
pub mod features;
pub mod lexicons;
pub mod models;
pub mod num;
pub mod pairing;
pub mod report;
pub mod synth;

pub use num::Real;

/// Default scalar used by the pipeline.
pub type Scalar = f64;

/// Per-bin success rate with `f64` scalars.
pub type BinnedRate = dynamics::BinnedRate<Scalar>;
/// Logistic-regression model with `f64` scalars.
pub type LogRegModel = models::LogRegModel<Scalar>;
/// Standardizer state with `f64` scalars.
pub type StandardizerState = models::StandardizerState<Scalar>;
/// Dense feature vector with `f64` scalars.
pub type FeatureVector = features::FeatureVector<Scalar>;
/// Dense feature matrix with `f64` scalars.
pub type FeatureMatrix = features::FeatureMatrix<Scalar>;
/// Loaded lexicon and norm resources with `f64` scalars.
pub type Resources = lexicons::Resources<Scalar>;
