use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Gini,
    Entropy,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Criterion::Gini => "gini",
            Criterion::Entropy => "entropy",
        })
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gini" => Ok(Criterion::Gini),
            "entropy" => Ok(Criterion::Entropy),
            _ => Err(Error::invalid(format!("unknown criterion {s:?}"))),
        }
    }
}

fn total(counts: &[u64]) -> Result<f64> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::invalid("impurity of an empty node"));
    }
    Ok(n as f64)
}

/// `1 - sum p_i^2`.
pub fn gini_impurity(counts: &[u64]) -> Result<f64> {
    let n = total(counts)?;
    Ok(1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>())
}

/// Shannon entropy in bits.
pub fn entropy(counts: &[u64]) -> Result<f64> {
    let n = total(counts)?;
    Ok(-counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>())
}

/// Impurity of a node with per-class weight sums `w`, multiplied by the
/// node weight. Split gains are differences of these.
pub(crate) fn weighted_node_impurity(criterion: Criterion, w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    match criterion {
        Criterion::Gini => total - w.iter().map(|x| x * x).sum::<f64>() / total,
        Criterion::Entropy => {
            total * total.log2() - w.iter().filter(|&&x| x > 0.0).map(|x| x * x.log2()).sum::<f64>()
        }
    }
}
