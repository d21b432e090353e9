use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, TransformOrder};
use crate::classifiers::TrainedModel;
use crate::error::{Error, Result};
use crate::features::{
    anova_f_scores, build_features, cache, pca_fit, select_percentile, stratified_subsample, train_test_split,
    FeatureMatrix, Standardizer,
};
use crate::ingest::{remap_binary, ClassFrequencyTable, Dataset, Encoders, IngestOptions};
use crate::metrics::EvaluationReport;
use crate::resampling::{resample, ResampleMethod};

pub const FEATURES_FILE: &str = "features.bin";
pub const ENCODERS_FILE: &str = "encoders.json";
pub const FREQUENCIES_FILE: &str = "class_frequencies.csv";

/// The ingested dataset as stored in a cache directory: every feature
/// column (including `time_block`), the fitted encoders and the class
/// frequency table of the full dataset.
#[derive(Debug, Clone)]
pub struct CachedDataset {
    pub matrix: FeatureMatrix,
    pub encoders: Encoders,
    pub frequencies: ClassFrequencyTable,
}

impl CachedDataset {
    pub fn from_dataset(ds: &Dataset) -> Result<Self> {
        let matrix = build_features(&ds.records, true, ds.n_classes())?;
        Ok(CachedDataset {
            frequencies: ClassFrequencyTable::from_labels(matrix.labels(), matrix.n_classes())?,
            matrix,
            encoders: ds.encoders.clone(),
        })
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        cache::save(&self.matrix, &dir.join(FEATURES_FILE))?;
        let enc = dir.join(ENCODERS_FILE);
        fs::write(&enc, serde_json::to_string_pretty(&self.encoders)?).map_err(|e| Error::io(&enc, e))?;
        self.frequencies
            .write_csv(&dir.join(FREQUENCIES_FILE), Some(&self.encoders.category))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let features = dir.join(FEATURES_FILE);
        if !features.exists() {
            return Err(Error::Config(format!(
                "no feature cache at {} (run `ingest` first)",
                features.display()
            )));
        }
        let matrix = cache::load(&features)?;
        let enc = dir.join(ENCODERS_FILE);
        let text = fs::read_to_string(&enc).map_err(|e| Error::io(&enc, e))?;
        let encoders: Encoders = serde_json::from_str(&text)?;
        if encoders.category.len() != matrix.n_classes() {
            return Err(Error::Format {
                path: enc,
                message: format!(
                    "{} categories but the matrix has {} classes",
                    encoders.category.len(),
                    matrix.n_classes()
                ),
            });
        }
        Ok(CachedDataset {
            frequencies: ClassFrequencyTable::from_labels(matrix.labels(), matrix.n_classes())?,
            matrix,
            encoders,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows_read: usize,
    pub rows_rejected: usize,
    pub rows_dropped: usize,
    pub rows_kept: usize,
    pub n_classes: usize,
}

/// Parses `csv_path`, encodes it and writes the cache directory.
pub fn ingest_to_cache(csv_path: &Path, cache_dir: &Path, opts: IngestOptions) -> Result<IngestSummary> {
    let ds = Dataset::load_csv(csv_path, opts)?;
    let cached = CachedDataset::from_dataset(&ds)?;
    cached.save(cache_dir)?;
    Ok(IngestSummary {
        rows_read: ds.rows_read,
        rows_rejected: ds.rows_rejected,
        rows_dropped: ds.rows_dropped,
        rows_kept: ds.records.len(),
        n_classes: ds.n_classes(),
    })
}

pub fn load_or_ingest(cfg: &ExperimentConfig) -> Result<CachedDataset> {
    if let (false, Some(csv)) = (cfg.cache.join(FEATURES_FILE).exists(), &cfg.data) {
        let s = ingest_to_cache(csv, &cfg.cache, IngestOptions::default())?;
        log::info!("ingested {} rows from {} into {}", s.rows_kept, csv.display(), cfg.cache.display());
    }
    CachedDataset::load(&cfg.cache)
}

/// 64-bit FNV-1a over the row values and labels of `m`.
pub fn matrix_digest(m: &FeatureMatrix) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    for v in m.values() {
        eat(&v.to_bits().to_le_bytes());
    }
    for l in m.labels() {
        eat(&l.to_le_bytes());
    }
    format!("{h:016x}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageNote {
    pub message: String,
    /// Test rows that were created by the resampler.
    pub synthetic_test_rows: usize,
}

/// Everything a cell run produces apart from the model and timings.
/// Serializes identically for identical config, data and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub name: String,
    pub model: String,
    pub config: ExperimentConfig,
    pub n_classes: usize,
    pub n_rows: usize,
    pub n_train_before_resample: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub feature_columns: Vec<String>,
    pub test_digest: String,
    pub accuracy: f64,
    pub log_loss: f64,
    pub log_loss_bits: f64,
    pub leakage: Option<LeakageNote>,
    pub evaluation: EvaluationReport,
}

impl CellRecord {
    pub fn accuracy_pct(&self) -> f64 {
        self.accuracy * 100.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Seconds per stage, in stage order.
    pub stages: Vec<(String, f64)>,
}

impl Timing {
    pub fn total(&self) -> f64 {
        self.stages.iter().map(|s| s.1).sum()
    }

    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f().map_err(|e| e.in_stage(stage))?;
        self.stages.push((stage.to_owned(), start.elapsed().as_secs_f64()));
        log::debug!("stage {stage} done in {:.3}s", start.elapsed().as_secs_f64());
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub record: CellRecord,
    pub model: TrainedModel,
    pub timing: Timing,
}

pub fn report_path(out: &Path, name: &str) -> PathBuf {
    out.join(format!("{name}.report.json"))
}

pub fn model_path(out: &Path, name: &str) -> PathBuf {
    out.join(format!("{name}.model.json"))
}

pub fn timing_path(out: &Path, name: &str) -> PathBuf {
    out.join(format!("{name}.timing.json"))
}

/// Label remap, column choice and subsampling shared by every protocol.
pub fn prepare_matrix(cfg: &ExperimentConfig, data: &CachedDataset) -> Result<FeatureMatrix> {
    let mut m = if cfg.features.time_block {
        data.matrix.clone()
    } else {
        data.matrix.drop_column("time_block")?
    };
    if let Some(t) = cfg.binary_threshold {
        let labels = remap_binary(m.labels(), &data.frequencies, t)?;
        m = m.with_labels(labels, 2)?;
    }
    if let Some(n) = cfg.subsample {
        if n < m.n_rows() {
            let idx = stratified_subsample(&m, n, cfg.seeds().subsample)?;
            m = m.take_rows(&idx);
        }
    }
    Ok(m)
}

fn standardize_pair(train: &FeatureMatrix, test: &FeatureMatrix) -> Result<(FeatureMatrix, FeatureMatrix)> {
    let s = Standardizer::fit(train)?;
    Ok((s.transform(train)?, s.transform(test)?))
}

/// Fits the configured selection and PCA on `train` and applies both to
/// each side.
pub fn apply_transforms(
    cfg: &ExperimentConfig,
    mut train: FeatureMatrix,
    mut test: FeatureMatrix,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    let f = &cfg.features;
    let steps: [bool; 2] = match f.order {
        TransformOrder::SelectThenPca => [true, false],
        TransformOrder::PcaThenSelect => [false, true],
    };
    for select in steps {
        if select {
            if let Some(p) = f.select_percentile {
                let sel = select_percentile(&anova_f_scores(&train)?, p)?;
                train = train.select_columns(&sel.selected)?;
                test = test.select_columns(&sel.selected)?;
            }
        } else if let Some(k) = f.pca_components {
            let pca = pca_fit(&train, k)?;
            train = pca.transform(&train)?;
            test = pca.transform(&test)?;
        }
    }
    Ok((train, test))
}

/// Runs one cell end to end on an already-loaded cache.
///
/// Default order: split, z-score fitted on train, resample train only,
/// feature transforms, fit, evaluate. With `resample.before_split` the
/// whole (standardized) matrix is resampled first and then split.
pub fn run_cell(cfg: &ExperimentConfig, data: &CachedDataset) -> Result<CellOutcome> {
    cfg.validate()?;
    let seeds = cfg.seeds();
    let mut timing = Timing::default();

    let m = timing.time("prepare", || prepare_matrix(cfg, data))?;
    let n_rows = m.n_rows();
    let before_split = cfg.resample.as_ref().is_some_and(|r| r.before_split);

    let (train, test, n_train_before, leakage) = if let (true, Some(r)) = (before_split, &cfg.resample) {
        let m = if cfg.features.zscore {
            timing.time("zscore", || Standardizer::fit(&m)?.transform(&m))?
        } else {
            m
        };
        let n_original = m.n_rows();
        let resampled = timing.time("resample", || resample(&m, &r.config(seeds.resample)))?;
        let split = timing.time("split", || train_test_split(&resampled, cfg.test_fraction, seeds.split))?;
        let synthetic = match r.method {
            ResampleMethod::Smote => split.test_indices.iter().filter(|&&i| i >= n_original).count(),
            _ => 0,
        };
        let note = LeakageNote {
            message: format!(
                "{} applied before the train/test split; test rows were chosen by the resampler and scores are optimistic",
                r.method
            ),
            synthetic_test_rows: synthetic,
        };
        let n_train = split.train.n_rows();
        (split.train, split.test, n_train, Some(note))
    } else {
        let split = timing.time("split", || train_test_split(&m, cfg.test_fraction, seeds.split))?;
        let (train, test) = if cfg.features.zscore {
            timing.time("zscore", || standardize_pair(&split.train, &split.test))?
        } else {
            (split.train, split.test)
        };
        let n_train = train.n_rows();
        let train = match &cfg.resample {
            Some(r) => timing.time("resample", || resample(&train, &r.config(seeds.resample)))?,
            None => train,
        };
        (train, test, n_train, None)
    };
    let test_digest = matrix_digest(&test);

    let (train, test) = timing.time("transform", || apply_transforms(cfg, train, test))?;
    let spec = cfg.model.with_seed(seeds.model);
    let model = timing.time("fit", || spec.fit(&train))?;
    let evaluation = timing.time("evaluate", || {
        let probs = model.predict_proba(&test)?;
        EvaluationReport::from_probabilities(test.labels(), &probs, test.n_classes())
    })?;

    let record = CellRecord {
        name: cfg.name.clone(),
        model: cfg.model.name().to_owned(),
        config: cfg.clone(),
        n_classes: train.n_classes(),
        n_rows,
        n_train_before_resample: n_train_before,
        n_train: train.n_rows(),
        n_test: test.n_rows(),
        feature_columns: train.column_names().to_vec(),
        test_digest,
        accuracy: evaluation.accuracy,
        log_loss: evaluation.log_loss,
        log_loss_bits: evaluation.log_loss / std::f64::consts::LN_2,
        leakage,
        evaluation,
    };
    Ok(CellOutcome { record, model, timing })
}

/// Writes report, model and timing files for a finished cell.
pub fn write_outcome(out: &Path, outcome: &CellOutcome) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let name = &outcome.record.name;
    outcome.model.save(&model_path(out, name))?;
    let timing = timing_path(out, name);
    fs::write(&timing, serde_json::to_string_pretty(&outcome.timing)?).map_err(|e| Error::io(&timing, e))?;
    // report last: its presence marks the cell complete
    let report = report_path(out, name);
    fs::write(&report, serde_json::to_string_pretty(&outcome.record)? + "\n").map_err(|e| Error::io(&report, e))
}

pub fn read_record(path: &Path) -> Result<CellRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Loads the cache named in `cfg` (ingesting `cfg.data` first if the cache
/// is missing), runs the cell and writes its outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<CellOutcome> {
    let data = load_or_ingest(cfg)?;
    let outcome = run_cell(cfg, &data)?;
    write_outcome(&cfg.out, &outcome)?;
    Ok(outcome)
}
