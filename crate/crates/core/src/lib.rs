//! Spatio-temporal crime classification.
//!
//! `sfcrime` takes the San Francisco incident export (one CSV row per
//! report) through the whole modelling loop:
//!
//! - [`ingest`]: CSV parsing, ordinal label encoding, timestamp
//!   decomposition, time-of-day blocks, class frequencies and histograms.
//! - [`features`]: the dense feature matrix, seeded train/test split,
//!   PCA, ANOVA F-scores and percentile selection, and the binary cache.
//! - [`classifiers`]: CART decision tree, k-nearest neighbours, random
//!   forest and SAMME AdaBoost, all with per-class probabilities.
//! - [`resampling`]: SMOTE, random undersampling and Wilson's edited
//!   nearest neighbours.
//! - [`metrics`]: accuracy, clipped multiclass log loss, confusion matrix
//!   and the empirical-prior baseline.
//! - [`experiment`]: config files, single-cell runs and the full
//!   experiment grid with resumable, seed-deterministic execution.
//!
//! Every algorithm is implemented in this crate; there is no dependency on
//! an external machine-learning framework.
//!
//! ```
//! use sfcrime::classifiers::{fit_decision_tree, DecisionTreeParams};
//! use sfcrime::features::FeatureMatrix;
//!
//! let m = FeatureMatrix::new(
//!     vec![1.0, 2.0, 3.0, 4.0],
//!     vec!["x".to_string()],
//!     vec![0, 0, 1, 1],
//!     2,
//! )
//! .unwrap();
//! let model = fit_decision_tree(&m, &DecisionTreeParams::default()).unwrap();
//! assert_eq!(model.predict(&m).unwrap(), vec![0, 0, 1, 1]);
//! ```

pub mod classifiers;
pub mod error;
pub mod experiment;
pub mod features;
pub mod ingest;
pub mod metrics;
pub mod neighbors;
pub mod resampling;
pub mod synth;

pub use error::{Error, Result};
