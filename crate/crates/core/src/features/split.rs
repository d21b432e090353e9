use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FeatureMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
    /// Source rows of `train`, ascending.
    pub train_indices: Vec<usize>,
    /// Source rows of `test`, ascending.
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub test_fraction: f64,
}

/// Number of test rows for `n` samples: `round(fraction * n)`, kept inside
/// `1..n` so neither side is empty.
pub fn test_size(n: usize, test_fraction: f64) -> usize {
    ((test_fraction * n as f64).round() as usize).clamp(1, n - 1)
}

/// Uniform random partition driven only by `seed`.
pub fn train_test_split(m: &FeatureMatrix, test_fraction: f64, seed: u64) -> Result<SplitPair> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!("test fraction {test_fraction} not in (0, 1)")));
    }
    let n = m.n_rows();
    if n < 2 {
        return Err(Error::invalid("need at least 2 rows to split"));
    }
    let n_test = test_size(n, test_fraction);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (test, train) = perm.split_at_mut(n_test);
    test.sort_unstable();
    train.sort_unstable();
    Ok(SplitPair {
        train: m.take_rows(train),
        test: m.take_rows(test),
        train_indices: train.to_vec(),
        test_indices: test.to_vec(),
        seed,
        test_fraction,
    })
}
