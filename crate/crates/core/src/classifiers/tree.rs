//! CART decision tree with Gini or entropy splits and optional sample
//! weights.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::impurity::{weighted_node_impurity, Criterion};
use super::argmax;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecisionTreeParams {
    pub criterion: Criterion,
    /// Nodes with fewer samples than this become leaves.
    pub min_samples_split: usize,
    pub max_depth: Option<usize>,
    /// Drives the feature order when only a random subset of features is
    /// examined per node.
    pub seed: u64,
}

impl Default for DecisionTreeParams {
    fn default() -> Self {
        DecisionTreeParams {
            criterion: Criterion::Gini,
            min_samples_split: 2,
            max_depth: None,
            seed: 0,
        }
    }
}

impl DecisionTreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::invalid("min_samples_split must be at least 2"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::invalid("max_depth must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    /// `(class, weight)` for every class present in the leaf, ascending by
    /// class. Weights are the class counts when unweighted.
    Leaf { value: Vec<(u32, f64)> },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub params: DecisionTreeParams,
    pub n_features: usize,
    pub n_classes: usize,
    /// Node 0 is the root.
    pub nodes: Vec<TreeNode>,
}

fn sparse(value: &[f64]) -> Vec<(u32, f64)> {
    value
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(c, &w)| (c as u32, w))
        .collect()
}

/// Best split found at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    /// Weighted impurity decrease: `I(parent) - I(left) - I(right)` with each
    /// impurity scaled by the node weight.
    pub gain: f64,
}

/// Gains closer than this (relative to node weight) count as ties.
const GAIN_TOL: f64 = 1e-10;

/// Splitting data for one fit: which rows, with what weights.
struct Work<'a> {
    x: &'a FeatureMatrix,
    rows: &'a [usize],
    weights: Option<&'a [f64]>,
    criterion: Criterion,
    n_classes: usize,
}

impl Work<'_> {
    #[inline]
    fn weight(&self, s: u32) -> f64 {
        self.weights.map_or(1.0, |w| w[s as usize])
    }

    #[inline]
    fn label(&self, s: u32) -> usize {
        self.x.labels()[self.rows[s as usize]] as usize
    }

    #[inline]
    fn value(&self, s: u32, feature: usize) -> f64 {
        self.x.get(self.rows[s as usize], feature)
    }

    fn class_weights(&self, samples: &[u32]) -> Vec<f64> {
        let mut w = vec![0.0; self.n_classes];
        for &s in samples {
            w[self.label(s)] += self.weight(s);
        }
        w
    }

    /// Best threshold for one feature, scanning midpoints between
    /// consecutive distinct values in ascending order.
    fn best_for_feature(
        &self,
        samples: &[u32],
        feature: usize,
        parent: &[f64],
        buf: &mut Vec<(f64, u32, f64)>,
    ) -> Option<SplitChoice> {
        buf.clear();
        buf.extend(samples.iter().map(|&s| (self.value(s, feature), self.label(s) as u32, self.weight(s))));
        buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        if buf[0].0 == buf[buf.len() - 1].0 {
            return None;
        }

        let total: f64 = parent.iter().sum();
        let parent_imp = weighted_node_impurity(self.criterion, parent);
        let xlogx = |v: f64| if v > 0.0 { v * v.log2() } else { 0.0 };

        let mut left = vec![0.0; self.n_classes];
        let mut right = parent.to_vec();
        let (mut lw, mut rw) = (0.0, total);
        // running sum of w_c^2 (gini) or w_c log2 w_c (entropy) per side
        let term = |v: f64| match self.criterion {
            Criterion::Gini => v * v,
            Criterion::Entropy => xlogx(v),
        };
        let mut lsum = 0.0;
        let mut rsum: f64 = right.iter().map(|&v| term(v)).sum();
        let side_imp = |w: f64, sum: f64| match self.criterion {
            Criterion::Gini => {
                if w > 0.0 {
                    w - sum / w
                } else {
                    0.0
                }
            }
            Criterion::Entropy => xlogx(w) - sum,
        };

        let mut best: Option<SplitChoice> = None;
        for i in 0..buf.len() - 1 {
            let (v, c, w) = buf[i];
            let c = c as usize;
            lsum += term(left[c] + w) - term(left[c]);
            rsum += term(right[c] - w) - term(right[c]);
            left[c] += w;
            right[c] -= w;
            lw += w;
            rw -= w;
            let next = buf[i + 1].0;
            if v == next {
                continue;
            }
            let gain = parent_imp - side_imp(lw, lsum) - side_imp(rw, rsum);
            if best.is_none_or(|b| gain > b.gain + GAIN_TOL * total) {
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
        best
    }
}

/// Is `cand` preferred over `best`? Larger gain wins; near-equal gains go
/// to the lower feature index, then the lower threshold.
fn better(cand: &SplitChoice, best: Option<&SplitChoice>, tol: f64) -> bool {
    match best {
        None => true,
        Some(b) => {
            cand.gain > b.gain + tol
                || ((cand.gain - b.gain).abs() <= tol
                    && (cand.feature, cand.threshold).partial_cmp(&(b.feature, b.threshold))
                        == Some(std::cmp::Ordering::Less))
        }
    }
}

impl DecisionTree {
    pub fn fit(train: &FeatureMatrix, params: &DecisionTreeParams) -> Result<Self> {
        let rows: Vec<usize> = (0..train.n_rows()).collect();
        Self::fit_rows(train, &rows, None, params, None)
    }

    /// Fits on `rows` of `train` (repeats allowed, as in a bootstrap), with
    /// optional per-entry `weights`. `max_features` limits each node to a
    /// random subset of features.
    pub fn fit_rows(
        train: &FeatureMatrix,
        rows: &[usize],
        weights: Option<&[f64]>,
        params: &DecisionTreeParams,
        max_features: Option<usize>,
    ) -> Result<Self> {
        params.validate()?;
        if rows.is_empty() {
            return Err(Error::Fit("empty training set".into()));
        }
        if let Some(w) = weights {
            if w.len() != rows.len() {
                return Err(Error::DimensionMismatch {
                    expected: rows.len(),
                    got: w.len(),
                });
            }
            if w.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                return Err(Error::invalid("sample weights must be finite and non-negative"));
            }
        }
        let d = train.n_features();
        let work = Work {
            x: train,
            rows,
            weights,
            criterion: params.criterion,
            n_classes: train.n_classes(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let subset = max_features.filter(|&m| m < d);

        let mut nodes = vec![TreeNode::Leaf { value: Vec::new() }];
        let mut stack: Vec<(usize, Vec<u32>, usize)> = vec![(0, (0..rows.len() as u32).collect(), 0)];
        let mut buf = Vec::with_capacity(rows.len());
        let mut features: Vec<usize> = (0..d).collect();

        while let Some((id, samples, depth)) = stack.pop() {
            let value = work.class_weights(&samples);
            let pure = value.iter().filter(|&&v| v > 0.0).count() <= 1;
            let depth_capped = params.max_depth.is_some_and(|m| depth >= m);
            if pure || depth_capped || samples.len() < params.min_samples_split {
                nodes[id] = TreeNode::Leaf { value: sparse(&value) };
                continue;
            }

            let total: f64 = value.iter().sum();
            let tol = GAIN_TOL * total;
            let mut best: Option<SplitChoice> = None;
            match subset {
                None => {
                    for f in 0..d {
                        if let Some(c) = work.best_for_feature(&samples, f, &value, &mut buf) {
                            if better(&c, best.as_ref(), tol) {
                                best = Some(c);
                            }
                        }
                    }
                }
                Some(m) => {
                    features.shuffle(&mut rng);
                    // examine `m` features that are not constant in this node
                    let mut examined = 0;
                    for &f in &features {
                        if examined == m {
                            break;
                        }
                        if let Some(c) = work.best_for_feature(&samples, f, &value, &mut buf) {
                            examined += 1;
                            if better(&c, best.as_ref(), tol) {
                                best = Some(c);
                            }
                        }
                    }
                }
            }

            match best {
                Some(split) if split.gain > tol => {
                    let (l, r): (Vec<u32>, Vec<u32>) = samples
                        .iter()
                        .partition(|&&s| work.value(s, split.feature) <= split.threshold);
                    let left = nodes.len();
                    nodes.push(TreeNode::Leaf { value: Vec::new() });
                    nodes.push(TreeNode::Leaf { value: Vec::new() });
                    nodes[id] = TreeNode::Split {
                        feature: split.feature,
                        threshold: split.threshold,
                        left,
                        right: left + 1,
                    };
                    // right pushed first so the left subtree is built first
                    stack.push((left + 1, r, depth + 1));
                    stack.push((left, l, depth + 1));
                }
                _ => nodes[id] = TreeNode::Leaf { value: sparse(&value) },
            }
        }

        Ok(DecisionTree {
            params: params.clone(),
            n_features: d,
            n_classes: train.n_classes(),
            nodes,
        })
    }

    /// Per-class weights of the leaf `x` falls into.
    pub fn leaf_value(&self, x: &[f64]) -> Vec<f64> {
        let mut dense = vec![0.0; self.n_classes];
        for &(c, w) in self.leaf(x) {
            dense[c as usize] = w;
        }
        dense
    }

    fn leaf(&self, x: &[f64]) -> &[(u32, f64)] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn proba_row(&self, x: &[f64]) -> Vec<f64> {
        let value = self.leaf_value(x);
        let total: f64 = value.iter().sum();
        if total > 0.0 {
            value.iter().map(|v| v / total).collect()
        } else {
            vec![1.0 / self.n_classes as f64; self.n_classes]
        }
    }

    pub fn predict_row(&self, x: &[f64]) -> u32 {
        argmax(&self.leaf_value(x)) as u32
    }

    pub fn root_split(&self) -> Option<(usize, f64)> {
        match &self.nodes[0] {
            TreeNode::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            TreeNode::Leaf { .. } => None,
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], id: usize) -> usize {
            match &nodes[id] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }
}
