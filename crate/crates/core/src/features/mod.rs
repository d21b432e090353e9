//! Feature matrix assembly, splitting, PCA and univariate selection.

mod anova;
pub mod cache;
mod eigen;
mod matrix;
mod pca;
mod split;

pub use anova::{anova_f_scores, percentile_count, select_percentile, FeatureSelection, PERFECT_SEPARATOR};
pub use eigen::symmetric_eigen;
pub use matrix::{build_features, stratified_subsample, FeatureMatrix, Standardizer, FEATURE_COLUMNS};
pub use pca::{covariance, pca_fit, PcaModel};
pub use split::{test_size, train_test_split, SplitPair};
