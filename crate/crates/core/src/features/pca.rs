use serde::{Deserialize, Serialize};

use super::eigen::symmetric_eigen;
use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Principal axes of a centered training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` unit rows of length `d`.
    pub components: Vec<Vec<f64>>,
    /// Variance along each component (sample covariance, `n - 1`),
    /// non-increasing.
    pub explained_variance: Vec<f64>,
}

/// Sample covariance (`n - 1` denominator) of the columns, row-major `d x d`.
pub fn covariance(m: &FeatureMatrix) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = (m.n_rows(), m.n_features());
    let mut mean = vec![0.0; d];
    for r in m.rows() {
        for (a, v) in mean.iter_mut().zip(r) {
            *a += v;
        }
    }
    mean.iter_mut().for_each(|a| *a /= n as f64);
    let mut cov = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for r in m.rows() {
        for j in 0..d {
            centered[j] = r[j] - mean[j];
        }
        for i in 0..d {
            for j in i..d {
                cov[i * d + j] += centered[i] * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            cov[i * d + j] /= denom;
            cov[j * d + i] = cov[i * d + j];
        }
    }
    (mean, cov)
}

pub fn pca_fit(m: &FeatureMatrix, n_components: usize) -> Result<PcaModel> {
    let d = m.n_features();
    if n_components == 0 || n_components > d {
        return Err(Error::invalid(format!("n_components {n_components} not in 1..={d}")));
    }
    if m.n_rows() < 2 {
        return Err(Error::invalid("PCA needs at least 2 rows"));
    }
    let (mean, cov) = covariance(m);
    let (values, vectors) = symmetric_eigen(&cov, d);

    let components = vectors
        .into_iter()
        .take(n_components)
        .map(|mut v| {
            // largest-magnitude entry positive; first such entry on ties
            let pivot = v
                .iter()
                .enumerate()
                .fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
            if v[pivot] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    // round-off can leave tiny negative eigenvalues on rank-deficient data
    let explained_variance = values.into_iter().take(n_components).map(|v| v.max(0.0)).collect();
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
    })
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    fn project(&self, row: &[f64], out: &mut Vec<f64>) {
        for c in &self.components {
            out.push(c.iter().zip(row).zip(&self.mean).map(|((w, x), mu)| w * (x - mu)).sum());
        }
    }

    pub fn transform(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        if m.n_features() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: m.n_features(),
            });
        }
        let mut values = Vec::with_capacity(m.n_rows() * self.n_components());
        for r in m.rows() {
            self.project(r, &mut values);
        }
        let names = (1..=self.n_components()).map(|i| format!("pc{i}")).collect();
        m.with_values(values, names)
    }

    /// Maps projected rows (row-major, `k` per row) back to feature space.
    pub fn inverse_transform(&self, projected: &[f64]) -> Vec<f64> {
        let (k, d) = (self.n_components(), self.dim());
        projected
            .chunks_exact(k)
            .flat_map(|z| {
                (0..d).map(move |j| self.mean[j] + (0..k).map(|c| z[c] * self.components[c][j]).sum::<f64>())
            })
            .collect()
    }
}
