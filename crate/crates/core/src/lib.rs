//! Dark-pattern text classification from scratch.
//!
//! The pipeline: load a labeled corpus of UI strings, clean the text,
//! turn it into sparse n-gram bag-of-words (or tf-idf) features, train
//! an L2-regularized logistic regression by batch gradient descent, and
//! evaluate with a confusion matrix, accuracy/precision/recall/F1, and
//! ROC/AUC. Cross-validation, grid search, feature importance, and
//! sensitivity analysis live in [`experiments`].
//!
//! Everything seeded is driven by a pinned SplitMix64 generator and
//! every reduction runs in a fixed order, so identical inputs produce
//! bit-identical models and reports — with or without the `parallel`
//! feature (rayon), which only changes how the work is scheduled.

pub mod corpus;
pub mod error;
pub mod experiments;
pub mod fixture;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod vectorizer;

mod exec;

pub use error::{Error, Result};
pub use exec::lane;
