//! Class rebalancing for a training matrix: SMOTE oversampling, random
//! undersampling and edited nearest neighbours.
//!
//! Distances are taken on the matrix as given; z-score it first if the
//! columns live on different scales.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::argmax;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::neighbors::{brute_force, KdTree, Metric, Neighbor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMethod {
    Smote,
    RandomUnder,
    Enn,
}

impl std::fmt::Display for ResampleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ResampleMethod::Smote => "smote",
            ResampleMethod::RandomUnder => "random_under",
            ResampleMethod::Enn => "enn",
        })
    }
}

/// Per-class size the resampler aims for.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// SMOTE: the largest class count; undersampling: the smallest non-zero
    /// class count.
    #[default]
    Reference,
    /// A fixed count per class.
    Count(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResampleConfig {
    pub method: ResampleMethod,
    /// Neighbour count; defaults to 5 for SMOTE and 3 for ENN.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub target: Target,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub metric: Metric,
}

impl ResampleConfig {
    pub fn new(method: ResampleMethod) -> Self {
        ResampleConfig {
            method,
            k: None,
            target: Target::Reference,
            seed: 0,
            metric: Metric::Euclidean,
        }
    }

    pub fn neighbors(&self) -> usize {
        self.k.unwrap_or(match self.method {
            ResampleMethod::Enn => 3,
            _ => 5,
        })
    }
}

pub fn resample(train: &FeatureMatrix, cfg: &ResampleConfig) -> Result<FeatureMatrix> {
    if cfg.neighbors() == 0 {
        return Err(Error::invalid("resampling k must be at least 1"));
    }
    match cfg.method {
        ResampleMethod::Smote => smote(train, cfg),
        ResampleMethod::RandomUnder => random_undersample(train, cfg),
        ResampleMethod::Enn => enn_undersample(train, cfg),
    }
}

/// Below this many points a brute-force scan beats building a tree.
const TREE_THRESHOLD: usize = 256;

enum Searcher<'a> {
    Brute(&'a [f64], usize, Metric),
    Tree(KdTree),
}

impl<'a> Searcher<'a> {
    fn new(points: &'a [f64], d: usize, metric: Metric) -> Self {
        if points.len() / d < TREE_THRESHOLD {
            Searcher::Brute(points, d, metric)
        } else {
            Searcher::Tree(KdTree::new(points, d, metric))
        }
    }

    fn query(&self, q: &[f64], k: usize, exclude: Option<usize>) -> Vec<Neighbor> {
        match self {
            Searcher::Brute(p, d, m) => brute_force(p, *d, q, k, *m, exclude),
            Searcher::Tree(t) => t.query(q, k, exclude),
        }
    }
}

/// Synthetic minority oversampling. Originals come first, in input order,
/// followed by the synthetic rows class by class.
pub fn smote(train: &FeatureMatrix, cfg: &ResampleConfig) -> Result<FeatureMatrix> {
    let k = cfg.neighbors();
    if k == 0 {
        return Err(Error::invalid("SMOTE k must be at least 1"));
    }
    let counts = train.class_counts();
    let target = match cfg.target {
        Target::Reference => counts.iter().copied().max().unwrap_or(0),
        Target::Count(n) => n,
    };
    let d = train.n_features();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut values = train.values().to_vec();
    let mut labels = train.labels().to_vec();

    for (class, rows) in train.class_indices().into_iter().enumerate() {
        let have = rows.len();
        if have == 0 || have >= target {
            continue;
        }
        let need = target - have;
        if have == 1 {
            log::warn!("class {class} has a single sample; duplicating it {need} times instead of interpolating");
            for _ in 0..need {
                values.extend_from_slice(train.row(rows[0]));
                labels.push(class as u32);
            }
            continue;
        }
        let k_eff = k.min(have - 1);
        let points = train.take_rows(&rows);
        let search = Searcher::new(points.values(), d, cfg.metric);
        let mut cache: Vec<Option<Vec<Neighbor>>> = vec![None; have];

        for _ in 0..need {
            let parent = rng.random_range(0..have);
            let nn = cache[parent]
                .get_or_insert_with(|| search.query(points.row(parent), k_eff, Some(parent)));
            let mate = nn[rng.random_range(0..nn.len())].index;
            let gap: f64 = rng.random();
            let (x, z) = (points.row(parent), points.row(mate));
            values.extend(x.iter().zip(z).map(|(a, b)| a + gap * (b - a)));
            labels.push(class as u32);
        }
    }
    FeatureMatrix::new(values, train.column_names().to_vec(), labels, train.n_classes())
}

/// Rows kept by random undersampling, ascending.
pub fn random_undersample_indices(train: &FeatureMatrix, cfg: &ResampleConfig) -> Result<Vec<usize>> {
    let by_class = train.class_indices();
    let present: Vec<usize> = by_class.iter().map(Vec::len).filter(|&c| c > 0).collect();
    if present.is_empty() {
        return Err(Error::invalid("cannot undersample an empty matrix"));
    }
    let target = match cfg.target {
        Target::Reference => *present.iter().min().expect("non-empty"),
        Target::Count(n) => n,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut keep = Vec::new();
    for rows in &by_class {
        if rows.len() <= target {
            keep.extend_from_slice(rows);
        } else {
            keep.extend(index::sample(&mut rng, rows.len(), target).into_iter().map(|i| rows[i]));
        }
    }
    keep.sort_unstable();
    Ok(keep)
}

pub fn random_undersample(train: &FeatureMatrix, cfg: &ResampleConfig) -> Result<FeatureMatrix> {
    Ok(train.take_rows(&random_undersample_indices(train, cfg)?))
}

/// Rows kept by one pass of Wilson editing, ascending: a row survives when
/// the majority label of its `k` nearest other rows (ties to the lowest
/// class code) equals its own.
pub fn enn_kept_indices(train: &FeatureMatrix, cfg: &ResampleConfig) -> Result<Vec<usize>> {
    let k = cfg.neighbors();
    let n = train.n_rows();
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("ENN needs 1 <= k < n (k = {k}, n = {n})")));
    }
    let search = Searcher::new(train.values(), train.n_features(), cfg.metric);
    let labels = train.labels();
    let keep: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut votes = vec![0.0; train.n_classes()];
            for nb in search.query(train.row(i), k, Some(i)) {
                votes[labels[nb.index] as usize] += 1.0;
            }
            argmax(&votes) == labels[i] as usize
        })
        .collect();
    Ok((0..n).filter(|&i| keep[i]).collect())
}

pub fn enn_undersample(train: &FeatureMatrix, cfg: &ResampleConfig) -> Result<FeatureMatrix> {
    Ok(train.take_rows(&enn_kept_indices(train, cfg)?))
}
