//! Datasets, CSV ingestion, stratified splitting, standardization and the
//! synthetic two-class generators used for desk-scale fixtures.

mod csv_io;
mod split;
mod standardize;
mod synthetic;

pub use csv_io::{ingest_csv, write_csv, Ingested, LabelColumn};
pub use split::{stratified_split, Partitions, SplitSpec};
pub use standardize::{apply_standardizer, fit_standardizer, StandardizationStats};
pub use synthetic::{generate_synthetic, SyntheticKind};

use crate::error::{Error, Result};

/// Feature matrix plus dense integer labels.
///
/// Features are stored row-major. Datasets built through [`Dataset::new`]
/// satisfy the full invariant set (finite values, every class present,
/// `n >= class_count`); [`Dataset::subset`] keeps `class_count` but may drop
/// classes, which is what bootstrap bags need.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    n_features: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    class_count: usize,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self> {
        let n_features = rows.first().map(Vec::len).unwrap_or(0);
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for row in &rows {
            if row.len() != n_features {
                return Err(Error::Dimension {
                    expected: n_features,
                    got: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        Self::from_flat(name, n_features, features, labels, class_count)
    }

    pub fn from_flat(
        name: impl Into<String>,
        n_features: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self> {
        let ds = Dataset {
            name: name.into(),
            n_features,
            features,
            labels,
            class_count,
            class_names: (0..class_count).map(|c| c.to_string()).collect(),
        };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::Empty(format!("dataset `{}` has no rows", self.name)));
        }
        if self.n_features == 0 {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        if self.features.len() != n * self.n_features {
            return Err(Error::Dimension {
                expected: n * self.n_features,
                got: self.features.len(),
            });
        }
        if self.class_count < 2 {
            return Err(Error::SingleClass);
        }
        if n < self.class_count {
            return Err(Error::InvalidDataset(format!(
                "{n} rows cannot cover {} classes",
                self.class_count
            )));
        }
        if let Some(v) = self.features.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite feature value {v}"
            )));
        }
        let mut seen = vec![false; self.class_count];
        for &l in &self.labels {
            if l >= self.class_count {
                return Err(Error::InvalidDataset(format!(
                    "label {l} out of range for {} classes",
                    self.class_count
                )));
            }
            seen[l] = true;
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidDataset(format!("class {c} has no instances")));
        }
        Ok(())
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.class_count {
            return Err(Error::Dimension {
                expected: self.class_count,
                got: names.len(),
            });
        }
        self.class_names = names;
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.n_features)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, in the given order. Duplicates are allowed.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Dataset {
            name: self.name.clone(),
            n_features: self.n_features,
            features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_count: self.class_count,
            class_names: self.class_names.clone(),
        }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if other.n_features != self.n_features {
            return Err(Error::Dimension {
                expected: self.n_features,
                got: other.n_features,
            });
        }
        if other.class_count != self.class_count {
            return Err(Error::InvalidDataset("class counts differ".into()));
        }
        let mut ds = self.clone();
        ds.features.extend_from_slice(&other.features);
        ds.labels.extend_from_slice(&other.labels);
        Ok(ds)
    }

    pub(crate) fn map_features(&self, f: impl Fn(usize, f64) -> f64) -> Dataset {
        let d = self.n_features;
        let features = self
            .features
            .iter()
            .enumerate()
            .map(|(k, &v)| f(k % d, v))
            .collect();
        Dataset {
            features,
            ..self.clone()
        }
    }
}
