//! Decision tree, KNN, random forest and AdaBoost classifiers behind one
//! [`TrainedModel`] type.

mod adaboost;
mod forest;
mod impurity;
mod knn;
mod tree;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use adaboost::{samme_alpha, weighted_error, AdaBoost, AdaboostParams, BoostRound};
pub use forest::{default_features_per_split, ForestParams, RandomForest};
pub use impurity::{entropy, gini_impurity, Criterion};
pub use knn::{KnnModel, KnnParams, SearchAlgorithm};
pub use tree::{DecisionTree, DecisionTreeParams, SplitChoice, TreeNode};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax(row: &[f64]) -> usize {
    row.iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > row[best] { i } else { best })
}

/// Which classifier to fit, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    DecisionTree(DecisionTreeParams),
    Knn(KnnParams),
    RandomForest(ForestParams),
    Adaboost(AdaboostParams),
}

impl ModelSpec {
    pub fn fit(&self, train: &FeatureMatrix) -> Result<TrainedModel> {
        match self {
            ModelSpec::DecisionTree(p) => fit_decision_tree(train, p),
            ModelSpec::Knn(p) => fit_knn(train, p),
            ModelSpec::RandomForest(p) => fit_random_forest(train, p),
            ModelSpec::Adaboost(p) => fit_adaboost(train, p),
        }
    }

    /// Copy with every seed inside the parameters replaced by `seed`.
    pub fn with_seed(&self, seed: u64) -> ModelSpec {
        let mut spec = self.clone();
        match &mut spec {
            ModelSpec::DecisionTree(p) => p.seed = seed,
            ModelSpec::Knn(_) => {}
            ModelSpec::RandomForest(p) => {
                p.seed = seed;
                p.tree.seed = seed;
            }
            ModelSpec::Adaboost(p) => {
                p.seed = seed;
                p.base.seed = seed;
            }
        }
        spec
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::DecisionTree(_) => "decision_tree",
            ModelSpec::Knn(_) => "knn",
            ModelSpec::RandomForest(_) => "random_forest",
            ModelSpec::Adaboost(_) => "adaboost",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum TrainedModel {
    DecisionTree(DecisionTree),
    Knn(KnnModel),
    RandomForest(RandomForest),
    Adaboost(AdaBoost),
}

pub fn fit_decision_tree(train: &FeatureMatrix, params: &DecisionTreeParams) -> Result<TrainedModel> {
    DecisionTree::fit(train, params).map(TrainedModel::DecisionTree)
}

pub fn fit_knn(train: &FeatureMatrix, params: &KnnParams) -> Result<TrainedModel> {
    KnnModel::fit(train, params).map(TrainedModel::Knn)
}

pub fn fit_random_forest(train: &FeatureMatrix, params: &ForestParams) -> Result<TrainedModel> {
    RandomForest::fit(train, params).map(TrainedModel::RandomForest)
}

pub fn fit_adaboost(train: &FeatureMatrix, params: &AdaboostParams) -> Result<TrainedModel> {
    AdaBoost::fit(train, params).map(TrainedModel::Adaboost)
}

/// On-disk envelope for a fitted model.
#[derive(Serialize, Deserialize)]
struct ModelFile<M> {
    format: String,
    version: u32,
    model: M,
}

const MODEL_FORMAT: &str = "sfcrime-model";
const MODEL_VERSION: u32 = 2;

impl TrainedModel {
    pub fn n_classes(&self) -> usize {
        match self {
            TrainedModel::DecisionTree(m) => m.n_classes,
            TrainedModel::Knn(m) => m.n_classes,
            TrainedModel::RandomForest(m) => m.n_classes,
            TrainedModel::Adaboost(m) => m.n_classes,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::DecisionTree(m) => m.n_features,
            TrainedModel::Knn(m) => m.n_features,
            TrainedModel::RandomForest(m) => m.n_features,
            TrainedModel::Adaboost(m) => m.n_features,
        }
    }

    pub fn variant(&self) -> &'static str {
        match self {
            TrainedModel::DecisionTree(_) => "decision_tree",
            TrainedModel::Knn(_) => "knn",
            TrainedModel::RandomForest(_) => "random_forest",
            TrainedModel::Adaboost(_) => "adaboost",
        }
    }

    /// One probability row per input row, `n_classes` wide.
    pub fn predict_proba(&self, rows: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        if rows.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got: rows.n_features(),
            });
        }
        let per_row = |f: &(dyn Fn(&[f64]) -> Vec<f64> + Sync)| -> Vec<Vec<f64>> {
            (0..rows.n_rows()).into_par_iter().map(|i| f(rows.row(i))).collect()
        };
        Ok(match self {
            TrainedModel::DecisionTree(t) => per_row(&|x| t.proba_row(x)),
            TrainedModel::Knn(k) => k.predict_proba(rows)?,
            TrainedModel::RandomForest(f) => per_row(&|x| f.proba_row(x)),
            TrainedModel::Adaboost(a) => per_row(&|x| a.proba_row(x)),
        })
    }

    pub fn predict(&self, rows: &FeatureMatrix) -> Result<Vec<u32>> {
        Ok(self
            .predict_proba(rows)?
            .iter()
            .map(|p| argmax(p) as u32)
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelFile {
            format: MODEL_FORMAT.to_owned(),
            version: MODEL_VERSION,
            model: self,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile<TrainedModel> = serde_json::from_str(text)?;
        if file.format != MODEL_FORMAT {
            return Err(Error::invalid(format!("not a model file (format {:?})", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::invalid(format!("unsupported model version {}", file.version)));
        }
        Ok(file.model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer(
            &mut w,
            &ModelFile {
                format: MODEL_FORMAT.to_owned(),
                version: MODEL_VERSION,
                model: self,
            },
        )?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut text = String::new();
        std::io::Read::read_to_string(&mut BufReader::new(f), &mut text).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
