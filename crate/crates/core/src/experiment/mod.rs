//! Experiment cells, the comparison grid and the files they write.
//!
//! A cell is one [`ExperimentConfig`]: a cached dataset, a model, optional
//! resampling and feature transforms, and a seed. [`run_cell`] is pure
//! given its inputs; [`reproduce`] runs a [`GridSpec`] and assembles
//! comparison tables.

mod config;
mod grid;
mod report;
mod runner;

pub use config::{ExperimentConfig, FeatureConfig, ResampleSpec, StageSeeds, TransformOrder};
pub use grid::{grid_forest, rebalance_forest, GridCell, GridSpec, Reference, TABLES};
pub use report::{explore, explore_axis, histogram_svg, reproduce, ReproduceSummary};
pub use runner::{
    apply_transforms, ingest_to_cache, load_or_ingest, matrix_digest, model_path, prepare_matrix, read_record, report_path,
    run_cell, run_experiment, timing_path, write_outcome, CachedDataset, CellOutcome, CellRecord, IngestSummary,
    LeakageNote, Timing, ENCODERS_FILE, FEATURES_FILE, FREQUENCIES_FILE,
};
