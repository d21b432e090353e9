use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::neighbors::{brute_force, KdTree, Metric, Neighbor};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchAlgorithm {
    #[default]
    Brute,
    KdTree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    pub n_neighbors: usize,
    pub metric: Metric,
    /// Weight each neighbour's vote by inverse distance.
    pub distance_weighted: bool,
    pub algorithm: SearchAlgorithm,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            n_neighbors: 5,
            metric: Metric::Euclidean,
            distance_weighted: false,
            algorithm: SearchAlgorithm::Brute,
        }
    }
}

/// Fitted KNN: the training rows themselves.
#[derive(Serialize, Deserialize)]
pub struct KnnModel {
    pub params: KnnParams,
    pub n_features: usize,
    pub n_classes: usize,
    points: Vec<f64>,
    labels: Vec<u32>,
    #[serde(skip)]
    index: OnceLock<KdTree>,
}

impl std::fmt::Debug for KnnModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KnnModel")
            .field("params", &self.params)
            .field("n_train", &self.labels.len())
            .field("n_classes", &self.n_classes)
            .finish()
    }
}

impl Clone for KnnModel {
    fn clone(&self) -> Self {
        KnnModel {
            params: self.params.clone(),
            n_features: self.n_features,
            n_classes: self.n_classes,
            points: self.points.clone(),
            labels: self.labels.clone(),
            index: OnceLock::new(),
        }
    }
}

impl PartialEq for KnnModel {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.n_classes == other.n_classes
            && self.points == other.points
            && self.labels == other.labels
    }
}

impl KnnModel {
    pub fn fit(train: &FeatureMatrix, params: &KnnParams) -> Result<Self> {
        if params.n_neighbors == 0 {
            return Err(Error::invalid("n_neighbors must be at least 1"));
        }
        if params.n_neighbors > train.n_rows() {
            return Err(Error::invalid(format!(
                "n_neighbors {} exceeds training size {}",
                params.n_neighbors,
                train.n_rows()
            )));
        }
        Ok(KnnModel {
            params: params.clone(),
            n_features: train.n_features(),
            n_classes: train.n_classes(),
            points: train.values().to_vec(),
            labels: train.labels().to_vec(),
            index: OnceLock::new(),
        })
    }

    pub fn n_train(&self) -> usize {
        self.labels.len()
    }

    /// The `k` nearest training rows to `query`, nearest first.
    pub fn neighbors(&self, query: &[f64], k: usize) -> Vec<Neighbor> {
        match self.params.algorithm {
            SearchAlgorithm::Brute => brute_force(&self.points, self.n_features, query, k, self.params.metric, None),
            SearchAlgorithm::KdTree => self
                .index
                .get_or_init(|| KdTree::new(&self.points, self.n_features, self.params.metric))
                .query(query, k, None),
        }
    }

    /// Neighbour lists of length `k` for every row of `rows`. Useful for
    /// sweeping `n_neighbors`: prefixes give the answer for smaller `k`.
    pub fn neighbor_lists(&self, rows: &FeatureMatrix, k: usize) -> Result<Vec<Vec<Neighbor>>> {
        self.check(rows)?;
        Ok((0..rows.n_rows())
            .into_par_iter()
            .map(|i| self.neighbors(rows.row(i), k))
            .collect())
    }

    /// Class distribution over the first `k` entries of a neighbour list.
    pub fn vote(&self, neighbors: &[Neighbor], k: usize) -> Vec<f64> {
        let near = &neighbors[..k.min(neighbors.len())];
        let mut p = vec![0.0; self.n_classes];
        if self.params.distance_weighted {
            // exact matches take all the weight when present
            let exact: Vec<&Neighbor> = near.iter().filter(|n| n.rank == 0.0).collect();
            if exact.is_empty() {
                for n in near {
                    p[self.labels[n.index] as usize] += 1.0 / self.params.metric.distance_from_rank(n.rank);
                }
            } else {
                for n in exact {
                    p[self.labels[n.index] as usize] += 1.0;
                }
            }
        } else {
            for n in near {
                p[self.labels[n.index] as usize] += 1.0;
            }
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
        p
    }

    fn check(&self, rows: &FeatureMatrix) -> Result<()> {
        if rows.n_features() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: rows.n_features(),
            });
        }
        Ok(())
    }

    pub fn predict_proba(&self, rows: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        self.check(rows)?;
        let k = self.params.n_neighbors;
        Ok((0..rows.n_rows())
            .into_par_iter()
            .map(|i| self.vote(&self.neighbors(rows.row(i), k), k))
            .collect())
    }
}
