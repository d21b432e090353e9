//! Multiclass AdaBoost (SAMME) over weighted decision trees.

use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, DecisionTreeParams};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaboostParams {
    pub n_estimators: usize,
    pub base: DecisionTreeParams,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for AdaboostParams {
    fn default() -> Self {
        AdaboostParams {
            n_estimators: 50,
            base: DecisionTreeParams {
                max_depth: Some(3),
                ..Default::default()
            },
            learning_rate: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostRound {
    pub tree: DecisionTree,
    pub weighted_error: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    pub params: AdaboostParams,
    pub n_features: usize,
    pub n_classes: usize,
    pub rounds: Vec<BoostRound>,
}

/// Error used in place of zero when a base tree fits the weights perfectly,
/// which caps the estimator weight.
const MIN_ERROR: f64 = 1e-10;

/// `sum w_i [pred_i != y_i] / sum w_i`.
pub fn weighted_error(pred: &[u32], truth: &[u32], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let wrong: f64 = pred
        .iter()
        .zip(truth)
        .zip(weights)
        .filter(|((p, t), _)| p != t)
        .map(|(_, w)| w)
        .sum();
    wrong / total
}

/// SAMME estimator weight for weighted error `err` with `k` classes.
pub fn samme_alpha(err: f64, k: usize, learning_rate: f64) -> f64 {
    let err = err.max(MIN_ERROR);
    learning_rate * (((1.0 - err) / err).ln() + ((k - 1) as f64).ln())
}

impl AdaBoost {
    pub fn fit(train: &FeatureMatrix, params: &AdaboostParams) -> Result<Self> {
        Self::fit_observed(train, params, |_, _| {})
    }

    /// Like [`AdaBoost::fit`], calling `observe(round, weights)` with the
    /// normalized sample weights after every kept round.
    pub fn fit_observed<F>(train: &FeatureMatrix, params: &AdaboostParams, mut observe: F) -> Result<Self>
    where
        F: FnMut(usize, &[f64]),
    {
        if params.n_estimators == 0 {
            return Err(Error::invalid("n_estimators must be at least 1"));
        }
        if !(params.learning_rate > 0.0 && params.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        let n = train.n_rows();
        if n == 0 {
            return Err(Error::Fit("empty training set".into()));
        }
        let k = train.n_classes();
        if k < 2 {
            return Err(Error::invalid("boosting needs at least two classes"));
        }

        let rows: Vec<usize> = (0..n).collect();
        let mut weights = vec![1.0 / n as f64; n];
        let mut rounds = Vec::with_capacity(params.n_estimators);
        let chance = 1.0 - 1.0 / k as f64;

        for round in 0..params.n_estimators {
            let base = DecisionTreeParams {
                seed: params.seed.wrapping_add(round as u64),
                ..params.base.clone()
            };
            let tree = DecisionTree::fit_rows(train, &rows, Some(&weights), &base, None)?;
            let pred: Vec<u32> = train.rows().map(|r| tree.predict_row(r)).collect();
            let err = weighted_error(&pred, train.labels(), &weights);

            if err >= chance {
                if rounds.is_empty() {
                    return Err(Error::Fit(format!(
                        "base learner no better than chance on the first round (weighted error {err:.4} >= {chance:.4})"
                    )));
                }
                log::info!("stopping boosting at round {round}: weighted error {err:.4} at chance level");
                break;
            }

            let alpha = samme_alpha(err, k, params.learning_rate);
            let perfect = err <= 0.0;
            if !perfect {
                let boost = alpha.exp();
                for ((w, p), y) in weights.iter_mut().zip(&pred).zip(train.labels()) {
                    if p != y {
                        *w *= boost;
                    }
                }
                let total: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= total);
            }
            rounds.push(BoostRound {
                tree,
                weighted_error: err,
                alpha,
            });
            observe(round, &weights);
            if perfect {
                break;
            }
        }

        Ok(AdaBoost {
            params: params.clone(),
            n_features: train.n_features(),
            n_classes: k,
            rounds,
        })
    }

    /// Estimator-weighted class votes normalized to sum to one.
    pub fn proba_row(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        for r in &self.rounds {
            votes[r.tree.predict_row(x) as usize] += r.alpha;
        }
        let total: f64 = votes.iter().sum();
        if total > 0.0 {
            votes.iter_mut().for_each(|v| *v /= total);
        } else {
            votes.iter_mut().for_each(|v| *v = 1.0 / self.n_classes as f64);
        }
        votes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_base_stops_after_one_round() {
        let m = FeatureMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0]], vec![0, 0, 1, 1], 2).unwrap();
        let model = AdaBoost::fit(&m, &AdaboostParams::default()).unwrap();
        assert_eq!(model.rounds.len(), 1);
        for (r, &y) in m.rows().zip(m.labels()) {
            assert_eq!(model.proba_row(r)[y as usize], 1.0);
        }
    }

    #[test]
    fn binary_alpha_is_classic() {
        let err = 0.2;
        assert!((samme_alpha(err, 2, 1.0) - (0.8f64 / 0.2).ln()).abs() < 1e-15);
        assert!((samme_alpha(err, 5, 0.5) - 0.5 * ((4.0f64).ln() + 4f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn weights_stay_a_distribution() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.7).sin(), (i as f64 * 1.9).cos()]).collect();
        let labels: Vec<u32> = (0..40).map(|i| ((i * 7) % 3) as u32).collect();
        let m = FeatureMatrix::from_rows(&rows, labels, 3).unwrap();
        let params = AdaboostParams {
            n_estimators: 15,
            base: DecisionTreeParams {
                max_depth: Some(1),
                ..Default::default()
            },
            ..Default::default()
        };
        let mut seen = 0;
        AdaBoost::fit_observed(&m, &params, |_, w| {
            seen += 1;
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(w.iter().all(|&v| v > 0.0));
        })
        .unwrap();
        assert!(seen >= 1);
    }

    #[test]
    fn chance_level_first_round_is_an_error() {
        // identical rows, alternating labels: every tree is a single leaf
        let m = FeatureMatrix::from_rows(&vec![vec![0.0]; 4], vec![0, 1, 0, 1], 2).unwrap();
        assert!(matches!(AdaBoost::fit(&m, &AdaboostParams::default()), Err(Error::Fit(_))));
    }
}
