//! Accuracy, clipped multiclass log loss and confusion matrices.

use serde::{Deserialize, Serialize};

use crate::classifiers::argmax;
use crate::error::{Error, Result};
use crate::ingest::ClassFrequencyTable;

pub const DEFAULT_EPS: f64 = 1e-15;

/// Probability rows must sum to one within this before renormalizing.
pub const ROW_SUM_TOL: f64 = 1e-6;

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    if a == 0 {
        return Err(Error::invalid("no samples to score"));
    }
    Ok(())
}

pub fn accuracy(y_true: &[u32], y_pred: &[u32]) -> Result<f64> {
    check_lengths(y_true.len(), y_pred.len())?;
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / y_true.len() as f64)
}

/// Mean negative natural log of the probability given to the true class,
/// clipped to `[eps, 1 - eps]`.
pub fn log_loss(y_true: &[u32], probs: &[Vec<f64>], eps: f64) -> Result<f64> {
    check_lengths(y_true.len(), probs.len())?;
    let mut total = 0.0;
    for (i, (&y, row)) in y_true.iter().zip(probs).enumerate() {
        let y = y as usize;
        if y >= row.len() {
            return Err(Error::LabelOutOfRange {
                label: y,
                n_classes: row.len(),
            });
        }
        let sum: f64 = row.iter().sum();
        if row.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::invalid(format!("probability row {i} is not a distribution (sums to {sum})")));
        }
        let p = (row[y] / sum).clamp(eps, 1.0 - eps);
        total -= p.ln();
    }
    Ok(total / y_true.len() as f64)
}

/// `confusion[t][p]` counts samples of true class `t` predicted as `p`.
pub fn confusion_matrix(y_true: &[u32], y_pred: &[u32], n_classes: usize) -> Result<Vec<Vec<u64>>> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let mut m = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        for l in [t, p] {
            if l as usize >= n_classes {
                return Err(Error::LabelOutOfRange {
                    label: l as usize,
                    n_classes,
                });
            }
        }
        m[t as usize][p as usize] += 1;
    }
    Ok(m)
}

/// Accuracy of always predicting the most frequent class, and log loss
/// (nats) of predicting the empirical class distribution for every row.
pub fn majority_baseline(freq: &ClassFrequencyTable) -> Result<(f64, f64)> {
    let total = freq.total();
    if total == 0 {
        return Err(Error::invalid("empty frequency table"));
    }
    let n = total as f64;
    let max = *freq.counts().iter().max().expect("non-empty table") as f64;
    let entropy = -freq
        .counts()
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>();
    Ok((max / n, entropy.max(0.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub accuracy: f64,
    pub log_loss: f64,
    pub n_test: usize,
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<u64>>,
    /// `None` for classes absent from the test labels.
    pub per_class_recall: Vec<Option<f64>>,
}

impl EvaluationReport {
    pub fn from_probabilities(y_true: &[u32], probs: &[Vec<f64>], n_classes: usize) -> Result<Self> {
        let pred: Vec<u32> = probs.iter().map(|p| argmax(p) as u32).collect();
        let confusion = confusion_matrix(y_true, &pred, n_classes)?;
        let per_class_recall = confusion
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let n: u64 = row.iter().sum();
                (n > 0).then(|| row[c] as f64 / n as f64)
            })
            .collect();
        Ok(EvaluationReport {
            accuracy: accuracy(y_true, &pred)?,
            log_loss: log_loss(y_true, probs, DEFAULT_EPS)?,
            n_test: y_true.len(),
            confusion,
            per_class_recall,
        })
    }
}
