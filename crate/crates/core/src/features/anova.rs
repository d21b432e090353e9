use serde::{Deserialize, Serialize};

use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Score given to a feature whose within-class variance is zero while its
/// between-class variance is not; sorts above every finite score.
pub const PERFECT_SEPARATOR: f64 = f64::INFINITY;

/// One-way ANOVA F statistic of every column, grouping rows by label.
/// Only classes that occur in `m` count as groups.
pub fn anova_f_scores(m: &FeatureMatrix) -> Result<Vec<f64>> {
    let n = m.n_rows();
    let d = m.n_features();
    let counts = m.class_counts();
    let present: Vec<usize> = (0..counts.len()).filter(|&c| counts[c] > 0).collect();
    let k = present.len();
    if k < 2 {
        return Err(Error::invalid("F-test needs at least two classes"));
    }
    if n <= k {
        return Err(Error::invalid(format!(
            "F-test needs more samples than classes ({n} samples, {k} classes)"
        )));
    }

    let mut sums = vec![0.0; counts.len() * d];
    let mut grand = vec![0.0; d];
    for (r, &l) in m.rows().zip(m.labels()) {
        let base = l as usize * d;
        for j in 0..d {
            sums[base + j] += r[j];
            grand[j] += r[j];
        }
    }
    let group_mean = |c: usize, j: usize| sums[c * d + j] / counts[c] as f64;
    grand.iter_mut().for_each(|g| *g /= n as f64);

    let mut within = vec![0.0; d];
    let mut total = vec![0.0; d];
    for (r, &l) in m.rows().zip(m.labels()) {
        for j in 0..d {
            within[j] += (r[j] - group_mean(l as usize, j)).powi(2);
            total[j] += (r[j] - grand[j]).powi(2);
        }
    }

    let df_between = (k - 1) as f64;
    let df_within = (n - k) as f64;
    Ok((0..d)
        .map(|j| {
            let between: f64 = present
                .iter()
                .map(|&c| counts[c] as f64 * (group_mean(c, j) - grand[j]).powi(2))
                .sum();
            // sums of squares below this are rounding noise of a constant
            let noise = 1e-12 * (total[j] + grand[j] * grand[j] * n as f64).max(f64::MIN_POSITIVE);
            match (between <= noise, within[j] <= noise) {
                (true, _) => 0.0,
                (false, true) => PERFECT_SEPARATOR,
                (false, false) => (between / df_between) / (within[j] / df_within),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub scores: Vec<f64>,
    /// Retained column indices, ascending.
    pub selected: Vec<usize>,
    pub percentile: u32,
}

/// Number of columns kept out of `d` at `percentile`: `ceil(p * d / 100)`,
/// at least one.
pub fn percentile_count(d: usize, percentile: u32) -> usize {
    ((percentile as usize * d).div_ceil(100)).max(1)
}

/// Keeps the best-scoring `percentile` percent of columns; ties go to the
/// lower column index.
pub fn select_percentile(scores: &[f64], percentile: u32) -> Result<FeatureSelection> {
    if percentile == 0 || percentile > 100 {
        return Err(Error::invalid(format!("percentile {percentile} not in 1..=100")));
    }
    if scores.is_empty() {
        return Err(Error::invalid("no scores to select from"));
    }
    let keep = percentile_count(scores.len(), percentile);
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut selected = order[..keep].to_vec();
    selected.sort_unstable();
    Ok(FeatureSelection {
        scores: scores.to_vec(),
        selected,
        percentile,
    })
}
