use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ResampleSpec};
use crate::classifiers::{AdaboostParams, Criterion, DecisionTreeParams, ForestParams, KnnParams, ModelSpec};
use crate::error::{Error, Result};
use crate::resampling::ResampleMethod;

/// Published figure a cell is compared against. Log loss is in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub accuracy_pct: f64,
    pub log_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    /// Output table this cell belongs to.
    pub table: String,
    /// Short parameter description used as the row label.
    pub parameters: String,
    pub config: ExperimentConfig,
    pub reference: Option<Reference>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub cells: Vec<GridCell>,
}

pub const TABLES: [&str; 6] = ["decision_tree", "knn", "adaboost", "random_forest", "rebalancing", "binary"];

const BINARY_THRESHOLD: u64 = 10_000;

fn reference(accuracy_pct: f64, log_loss: f64) -> Option<Reference> {
    Some(Reference {
        accuracy_pct,
        log_loss: Some(log_loss),
    })
}

fn tree(criterion: Criterion, min_samples_split: usize) -> DecisionTreeParams {
    DecisionTreeParams {
        criterion,
        min_samples_split,
        ..Default::default()
    }
}

/// Forest used for the ensemble and binary rows.
pub fn grid_forest(n_estimators: usize) -> ModelSpec {
    ModelSpec::RandomForest(ForestParams {
        n_estimators,
        tree: tree(Criterion::Entropy, 300),
        ..Default::default()
    })
}

/// Forest used for the rebalancing rows. Undersampled training sets can be
/// far smaller than 300 rows, so trees are grown out fully.
pub fn rebalance_forest(n_estimators: usize) -> ModelSpec {
    ModelSpec::RandomForest(ForestParams {
        n_estimators,
        tree: tree(Criterion::Entropy, 2),
        ..Default::default()
    })
}

impl GridSpec {
    /// The full comparison grid. Paths, seed, subsample and feature options
    /// come from `base`; model, resampling and label options are per cell.
    pub fn published(base: &ExperimentConfig) -> GridSpec {
        let mut cells = Vec::new();
        let mut push = |table: &str,
                        name: String,
                        parameters: String,
                        model: ModelSpec,
                        resample: Option<ResampleSpec>,
                        binary: bool,
                        reference: Option<Reference>| {
            let mut config = base.clone();
            config.name = name;
            config.model = model;
            config.resample = resample;
            config.binary_threshold = binary.then(|| base.binary_threshold.unwrap_or(BINARY_THRESHOLD));
            cells.push(GridCell {
                table: table.to_owned(),
                parameters,
                config,
                reference,
            });
        };

        let dt = [
            (Criterion::Gini, 50, 28.26, 8.41),
            (Criterion::Gini, 100, 29.80, 5.45),
            (Criterion::Gini, 300, 30.72, 3.31),
            (Criterion::Gini, 500, 30.45, 2.83),
            (Criterion::Entropy, 50, 29.24, 8.41),
            (Criterion::Entropy, 100, 30.43, 5.52),
            (Criterion::Entropy, 300, 31.17, 3.31),
            (Criterion::Entropy, 500, 30.56, 2.91),
            (Criterion::Entropy, 600, 30.46, 2.76),
        ];
        for (c, split, acc, ll) in dt {
            push(
                "decision_tree",
                format!("dt_{c}_{split}"),
                format!("criterion={c} min_samples_split={split}"),
                ModelSpec::DecisionTree(tree(c, split)),
                None,
                false,
                reference(acc, ll),
            );
        }

        let knn = [
            (30, 28.14, 6.61),
            (50, 28.50, 5.04),
            (70, 28.39, 4.26),
            (100, 28.41, 3.71),
            (200, 28.35, 3.02),
            (300, 28.15, 2.78),
            (400, 27.96, 2.69),
            (500, 27.91, 2.62),
        ];
        for (k, acc, ll) in knn {
            push(
                "knn",
                format!("knn_{k}"),
                format!("n_neighbors={k}"),
                ModelSpec::Knn(KnnParams {
                    n_neighbors: k,
                    ..Default::default()
                }),
                None,
                false,
                reference(acc, ll),
            );
        }

        // the adaboost and forest reference rows are identical
        let ensembles = [(10, 31.22, 2.34), (50, 31.70, 2.28), (100, 31.71, 2.28)];
        for (n, acc, ll) in ensembles {
            push(
                "adaboost",
                format!("adaboost_{n}"),
                format!("n_estimators={n}"),
                ModelSpec::Adaboost(AdaboostParams {
                    n_estimators: n,
                    ..Default::default()
                }),
                None,
                false,
                reference(acc, ll),
            );
        }
        for (n, acc, ll) in ensembles {
            push(
                "random_forest",
                format!("rf_{n}"),
                format!("n_estimators={n}"),
                grid_forest(n),
                None,
                false,
                reference(acc, ll),
            );
        }

        let rebalancing = [
            (ResampleMethod::Smote, reference(73.89, 0.58)),
            (ResampleMethod::RandomUnder, reference(99.16, 0.17)),
            (ResampleMethod::Enn, None),
        ];
        for (method, refs) in rebalancing {
            for before_split in [true, false] {
                let protocol = if before_split { "before_split" } else { "after_split" };
                push(
                    "rebalancing",
                    format!("rf_100_{method}_{protocol}"),
                    format!("resample={method} protocol={protocol}"),
                    rebalance_forest(100),
                    Some(ResampleSpec {
                        method,
                        k: None,
                        before_split,
                    }),
                    false,
                    if before_split { refs } else { None },
                );
            }
        }

        push(
            "binary",
            "binary_rf_100".into(),
            "frequent_vs_rare n_estimators=100".into(),
            grid_forest(100),
            None,
            true,
            Some(Reference {
                accuracy_pct: 68.03,
                log_loss: None,
            }),
        );
        push(
            "binary",
            "binary_dt_entropy_300".into(),
            "frequent_vs_rare criterion=entropy min_samples_split=300".into(),
            ModelSpec::DecisionTree(tree(Criterion::Entropy, 300)),
            None,
            true,
            None,
        );

        GridSpec { cells }
    }

    /// Keeps only the cells of the listed tables.
    pub fn only_tables(mut self, tables: &[String]) -> Result<GridSpec> {
        for t in tables {
            if !self.cells.iter().any(|c| &c.table == t) {
                return Err(Error::Config(format!(
                    "unknown table {t:?} (expected one of {})",
                    TABLES.join(", ")
                )));
            }
        }
        self.cells.retain(|c| tables.contains(&c.table));
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = std::collections::BTreeSet::new();
        for c in &self.cells {
            c.config.validate()?;
            if !names.insert(c.config.name.as_str()) {
                return Err(Error::Config(format!("duplicate cell name {:?}", c.config.name)));
            }
        }
        Ok(())
    }

    pub fn tables(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !seen.contains(&c.table.as_str()) {
                seen.push(&c.table);
            }
        }
        seen
    }
}
