use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::ModelSpec;
use crate::error::{Error, Result};
use crate::resampling::{ResampleConfig, ResampleMethod};

/// Order in which the two optional feature transforms run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformOrder {
    #[default]
    SelectThenPca,
    PcaThenSelect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub time_block: bool,
    /// Standardize columns (fitted on training rows) before resampling and
    /// the transforms below.
    pub zscore: bool,
    pub pca_components: Option<usize>,
    pub select_percentile: Option<u32>,
    pub order: TransformOrder,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            time_block: true,
            zscore: false,
            pca_components: None,
            select_percentile: None,
            order: TransformOrder::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleSpec {
    pub method: ResampleMethod,
    #[serde(default)]
    pub k: Option<usize>,
    /// Resample the whole dataset before splitting. Synthetic and retained
    /// rows then leak into the test split; reports carry a warning.
    #[serde(default)]
    pub before_split: bool,
}

impl ResampleSpec {
    pub fn config(&self, seed: u64) -> ResampleConfig {
        ResampleConfig {
            k: self.k,
            seed,
            ..ResampleConfig::new(self.method)
        }
    }
}

/// One experiment cell. Every field can be set from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    /// Incident CSV; ingested into `cache` when the cache is missing.
    #[serde(default)]
    pub data: Option<PathBuf>,
    /// Directory written by `ingest`.
    #[serde(default = "default_cache")]
    pub cache: PathBuf,
    /// Directory that receives reports, models and tables.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    /// Class-stratified subsample size taken before anything else.
    #[serde(default)]
    pub subsample: Option<usize>,
    /// Collapse classes into frequent (count >= threshold) and rare.
    #[serde(default)]
    pub binary_threshold: Option<u64>,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default = "default_model")]
    pub model: ModelSpec,
    #[serde(default)]
    pub resample: Option<ResampleSpec>,
}

fn default_name() -> String {
    "cell".to_owned()
}
fn default_cache() -> PathBuf {
    PathBuf::from("cache")
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_model() -> ModelSpec {
    ModelSpec::DecisionTree(Default::default())
}
fn default_seed() -> u64 {
    42
}
fn default_test_fraction() -> f64 {
    0.25
}

/// Stage seeds derived from the global seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSeeds {
    pub split: u64,
    pub resample: u64,
    pub model: u64,
    pub subsample: u64,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, model: ModelSpec) -> Self {
        ExperimentConfig {
            name: name.into(),
            data: None,
            cache: default_cache(),
            out: default_out(),
            seed: default_seed(),
            test_fraction: default_test_fraction(),
            subsample: None,
            binary_threshold: None,
            features: FeatureConfig::default(),
            model,
            resample: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn seeds(&self) -> StageSeeds {
        StageSeeds {
            split: self.seed,
            resample: self.seed.wrapping_add(1),
            model: self.seed.wrapping_add(2),
            subsample: self.seed.wrapping_add(3),
        }
    }

    /// Parameter checks that need no data.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("cell name {:?} must be non-empty and contain no path separators", self.name));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction {} not in (0, 1)", self.test_fraction));
        }
        if self.subsample == Some(0) {
            return bad("subsample must be positive".into());
        }
        if self.binary_threshold == Some(0) {
            return bad("binary_threshold must be positive".into());
        }
        if self.features.pca_components == Some(0) {
            return bad("pca_components must be positive".into());
        }
        if let Some(p) = self.features.select_percentile {
            if p == 0 || p > 100 {
                return bad(format!("select_percentile {p} not in 1..=100"));
            }
        }
        if let Some(r) = &self.resample {
            if r.k == Some(0) {
                return bad("resample k must be positive".into());
            }
        }
        match &self.model {
            ModelSpec::DecisionTree(p) => p.validate(),
            ModelSpec::RandomForest(p) if p.n_estimators == 0 => bad("n_estimators must be positive".into()),
            ModelSpec::RandomForest(p) => p.tree.validate(),
            ModelSpec::Adaboost(p) if p.n_estimators == 0 || !(p.learning_rate > 0.0) => {
                bad("adaboost needs n_estimators >= 1 and learning_rate > 0".into())
            }
            ModelSpec::Adaboost(p) => p.base.validate(),
            ModelSpec::Knn(p) if p.n_neighbors == 0 => bad("n_neighbors must be positive".into()),
            ModelSpec::Knn(_) => Ok(()),
        }
        .map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{Criterion, DecisionTreeParams};

    const SAMPLE: &str = r#"
name = "dt_entropy_300"
seed = 7
subsample = 100000

[features]
time_block = true
select_percentile = 60

[model]
kind = "decision_tree"
criterion = "entropy"
min_samples_split = 300

[resample]
method = "smote"
k = 5
before_split = true
"#;

    #[test]
    fn parses_every_section() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.name, "dt_entropy_300");
        assert_eq!(c.seed, 7);
        assert_eq!(c.test_fraction, 0.25);
        assert_eq!(c.subsample, Some(100_000));
        assert_eq!(c.features.select_percentile, Some(60));
        assert!(c.features.time_block);
        assert_eq!(
            c.model,
            ModelSpec::DecisionTree(DecisionTreeParams {
                criterion: Criterion::Entropy,
                min_samples_split: 300,
                ..Default::default()
            })
        );
        let r = c.resample.as_ref().unwrap();
        assert!(r.before_split);
        assert_eq!(r.method, ResampleMethod::Smote);
        assert_eq!(c.seeds().model, 9);

        let again = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn rejects_bad_values() {
        let base = "[model]\nkind = \"knn\"\nn_neighbors = 5\n";
        assert!(ExperimentConfig::from_toml(base).is_ok());
        assert!(ExperimentConfig::from_toml(&format!("test_fraction = 1.5\n{base}")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("bogus = 1\n{base}")).is_err());
        assert!(ExperimentConfig::from_toml("[model]\nkind = \"knn\"\nn_neighbors = 0\n").is_err());
        assert!(ExperimentConfig::from_toml(
            "[model]\nkind = \"decision_tree\"\nmin_samples_split = 1\n"
        )
        .is_err());
    }
}
