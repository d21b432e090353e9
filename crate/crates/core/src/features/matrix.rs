use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{assign_time_block, CrimeRecord};

/// Dense row-major feature matrix with named columns and one integer label
/// per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: Vec<f64>,
    column_names: Vec<String>,
    labels: Vec<u32>,
    n_classes: usize,
}

impl FeatureMatrix {
    /// `values` is row-major with `labels.len()` rows and
    /// `column_names.len()` columns. Every label must be below `n_classes`.
    pub fn new(values: Vec<f64>, column_names: Vec<String>, labels: Vec<u32>, n_classes: usize) -> Result<Self> {
        let d = column_names.len();
        if d == 0 {
            return Err(Error::invalid("feature matrix needs at least one column"));
        }
        if values.len() != labels.len() * d {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * d,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at row {}, column {}",
                pos / d,
                column_names[pos % d]
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l as usize >= n_classes) {
            return Err(Error::LabelOutOfRange {
                label: l as usize,
                n_classes,
            });
        }
        Ok(FeatureMatrix {
            values,
            column_names,
            labels,
            n_classes,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u32>, n_classes: usize) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("ragged rows"));
        }
        let names = (0..d).map(|j| format!("f{j}")).collect();
        Self::new(rows.concat(), names, labels, n_classes)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.column_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_features())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_features() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Rows at `indices`, in the given order (duplicates allowed).
    pub fn take_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.n_features());
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        FeatureMatrix {
            values,
            column_names: self.column_names.clone(),
            labels,
            n_classes: self.n_classes,
        }
    }

    pub fn select_columns(&self, columns: &[usize]) -> Result<FeatureMatrix> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.n_features()) {
            return Err(Error::invalid(format!("column {bad} out of range")));
        }
        let values = self
            .rows()
            .flat_map(|r| columns.iter().map(move |&c| r[c]))
            .collect();
        let names = columns.iter().map(|&c| self.column_names[c].clone()).collect();
        FeatureMatrix::new(values, names, self.labels.clone(), self.n_classes)
    }

    pub fn drop_column(&self, name: &str) -> Result<FeatureMatrix> {
        let keep: Vec<usize> = (0..self.n_features())
            .filter(|&j| self.column_names[j] != name)
            .collect();
        self.select_columns(&keep)
    }

    pub fn with_labels(&self, labels: Vec<u32>, n_classes: usize) -> Result<FeatureMatrix> {
        if labels.len() != self.n_rows() {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows(),
                got: labels.len(),
            });
        }
        FeatureMatrix::new(self.values.clone(), self.column_names.clone(), labels, n_classes)
    }

    pub fn with_values(&self, values: Vec<f64>, column_names: Vec<String>) -> Result<FeatureMatrix> {
        FeatureMatrix::new(values, column_names, self.labels.clone(), self.n_classes)
    }

    /// Appends the rows of `other`, which must have the same columns.
    pub fn concat(&self, other: &FeatureMatrix) -> Result<FeatureMatrix> {
        if other.column_names != self.column_names {
            return Err(Error::invalid("concatenating matrices with different columns"));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        FeatureMatrix::new(values, self.column_names.clone(), labels, self.n_classes.max(other.n_classes))
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Row indices of each class, ascending.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut idx = vec![Vec::new(); self.n_classes];
        for (i, &l) in self.labels.iter().enumerate() {
            idx[l as usize].push(i);
        }
        idx
    }
}

/// Column order emitted by [`build_features`].
pub const FEATURE_COLUMNS: [&str; 10] = [
    "year",
    "month",
    "date",
    "hour",
    "time_block",
    "day",
    "district",
    "address",
    "x",
    "y",
];

pub fn build_features(records: &[CrimeRecord], use_time_block: bool, n_classes: usize) -> Result<FeatureMatrix> {
    if records.is_empty() {
        return Err(Error::invalid("no records to build features from"));
    }
    let names: Vec<String> = FEATURE_COLUMNS
        .iter()
        .filter(|&&c| use_time_block || c != "time_block")
        .map(|s| s.to_string())
        .collect();
    let mut values = Vec::with_capacity(records.len() * names.len());
    for r in records {
        values.extend_from_slice(&[f64::from(r.year), f64::from(r.month), f64::from(r.date), f64::from(r.hour)]);
        if use_time_block {
            values.push(f64::from(assign_time_block(r.hour)?.code()));
        }
        values.extend_from_slice(&[
            f64::from(r.day_code),
            f64::from(r.district_code),
            f64::from(r.address_code),
            r.x,
            r.y,
        ]);
    }
    let labels = records.iter().map(|r| r.label).collect();
    FeatureMatrix::new(values, names, labels, n_classes)
}

/// Per-column z-scoring fitted on one matrix and applied to others.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(m: &FeatureMatrix) -> Result<Self> {
        let n = m.n_rows();
        if n == 0 {
            return Err(Error::invalid("cannot standardize an empty matrix"));
        }
        let d = m.n_features();
        let mut mean = vec![0.0; d];
        for r in m.rows() {
            for (a, v) in mean.iter_mut().zip(r) {
                *a += v;
            }
        }
        mean.iter_mut().for_each(|a| *a /= n as f64);
        let mut var = vec![0.0; d];
        for r in m.rows() {
            for j in 0..d {
                var[j] += (r[j] - mean[j]).powi(2);
            }
        }
        // constant columns keep scale 1
        let scale = var
            .into_iter()
            .map(|v| {
                let s = (v / n as f64).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { mean, scale })
    }

    pub fn transform(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        if m.n_features() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: m.n_features(),
            });
        }
        let d = self.mean.len();
        let values = m
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| (v - self.mean[i % d]) / self.scale[i % d])
            .collect();
        m.with_values(values, m.column_names().to_vec())
    }
}

/// Seeded class-stratified subsample of `n` rows; returns ascending row
/// indices. Each class gets its proportional share, rounded by largest
/// remainder.
pub fn stratified_subsample(m: &FeatureMatrix, n: usize, seed: u64) -> Result<Vec<usize>> {
    let total = m.n_rows();
    if n == 0 || n > total {
        return Err(Error::invalid(format!("subsample size {n} not in 1..={total}")));
    }
    let by_class = m.class_indices();
    let exact: Vec<f64> = by_class
        .iter()
        .map(|c| c.len() as f64 * n as f64 / total as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|q| q.floor() as usize).collect();
    let mut short = n - quota.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..exact.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for c in order {
        if short == 0 {
            break;
        }
        if quota[c] < by_class[c].len() {
            quota[c] += 1;
            short -= 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Vec::with_capacity(n);
    for (rows, &q) in by_class.iter().zip(&quota) {
        let mut rows = rows.clone();
        let (chosen, _) = rows.partial_shuffle(&mut rng, q);
        picked.extend_from_slice(chosen);
    }
    picked.sort_unstable();
    Ok(picked)
}
