use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, DecisionTreeParams};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub tree: DecisionTreeParams,
    pub bootstrap: bool,
    /// Candidate features per node; `None` means `ceil(sqrt(d))`.
    pub features_per_split: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_estimators: 100,
            tree: DecisionTreeParams::default(),
            bootstrap: true,
            features_per_split: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub params: ForestParams,
    pub n_features: usize,
    pub n_classes: usize,
    pub trees: Vec<DecisionTree>,
}

pub fn default_features_per_split(d: usize) -> usize {
    ((d as f64).sqrt().ceil() as usize).max(1)
}

impl RandomForest {
    pub fn fit(train: &FeatureMatrix, params: &ForestParams) -> Result<Self> {
        if params.n_estimators == 0 {
            return Err(Error::invalid("n_estimators must be at least 1"));
        }
        let n = train.n_rows();
        if n == 0 {
            return Err(Error::Fit("empty training set".into()));
        }
        params.tree.validate()?;
        let d = train.n_features();
        let m = params
            .features_per_split
            .unwrap_or_else(|| default_features_per_split(d))
            .clamp(1, d);

        // tree i depends only on seed + i, so scheduling cannot change it
        let trees = (0..params.n_estimators)
            .into_par_iter()
            .map(|i| {
                let tree_seed = params.seed.wrapping_add(i as u64);
                let rows: Vec<usize> = if params.bootstrap {
                    let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let tree_params = DecisionTreeParams {
                    seed: tree_seed,
                    ..params.tree.clone()
                };
                DecisionTree::fit_rows(train, &rows, None, &tree_params, Some(m))
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(RandomForest {
            params: params.clone(),
            n_features: d,
            n_classes: train.n_classes(),
            trees,
        })
    }

    pub fn proba_row(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (acc, v) in p.iter_mut().zip(t.proba_row(x)) {
                *acc += v;
            }
        }
        let k = self.trees.len() as f64;
        p.iter_mut().for_each(|v| *v /= k);
        p
    }
}
