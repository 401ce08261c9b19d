//! kDN instance hardness, hardness binning, and the hardness-gated hybrid
//! classifier.
//!
//! kDN is the fraction of an instance's K nearest neighbours whose label
//! differs from its own. Values are kept as integer disagreement counts so
//! binning never straddles a floating-point boundary.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::des::majority_vote;
use crate::error::{Error, Result};
use crate::region::{nearest_neighbors, KnnClassifier};
use crate::selector::{DynamicSelector, Technique};

/// Number of the `k` nearest `reference` rows whose label differs from `label`.
pub fn kdn_count(
    query: &[f64],
    label: usize,
    reference: &Dataset,
    k: usize,
    exclude: Option<usize>,
) -> Result<usize> {
    let region = nearest_neighbors(query, reference, k, exclude)?;
    Ok(region.labels.iter().filter(|&&l| l != label).count())
}

/// kDN of a query that is not part of `reference`.
pub fn kdn(query: &[f64], label: usize, reference: &Dataset, k: usize) -> Result<f64> {
    Ok(kdn_count(query, label, reference, k, None)? as f64 / k as f64)
}

/// kDN of `reference` row `index`, which is left out of its own neighbourhood.
pub fn kdn_of_member(reference: &Dataset, index: usize, k: usize) -> Result<f64> {
    let count = kdn_count(
        reference.row(index),
        reference.label(index),
        reference,
        k,
        Some(index),
    )?;
    Ok(count as f64 / k as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessProfile {
    pub k: usize,
    /// Disagreeing-neighbour count per instance; kDN is `count / k`.
    pub counts: Vec<usize>,
    pub reference: String,
}

impl HardnessProfile {
    pub fn values(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.k as f64)
            .collect()
    }

    pub fn bins(&self) -> HardnessBins {
        let mut counts = vec![0; self.k + 1];
        for &c in &self.counts {
            counts[c] += 1;
        }
        HardnessBins {
            k: self.k,
            counts,
            assignments: self.counts.clone(),
        }
    }
}

/// Profiles every row of `data` against the other rows.
pub fn profile_self(data: &Dataset, k: usize) -> Result<HardnessProfile> {
    let counts = (0..data.len())
        .map(|i| kdn_count(data.row(i), data.label(i), data, k, Some(i)))
        .collect::<Result<_>>()?;
    Ok(HardnessProfile {
        k,
        counts,
        reference: format!("{} (leave-one-out)", data.name()),
    })
}

/// Profiles every row of `test` against `reference`.
pub fn profile_against(test: &Dataset, reference: &Dataset, k: usize) -> Result<HardnessProfile> {
    let counts = test
        .rows()
        .zip(test.labels())
        .map(|(x, &y)| kdn_count(x, y, reference, k, None))
        .collect::<Result<_>>()?;
    Ok(HardnessProfile {
        k,
        counts,
        reference: reference.name().to_string(),
    })
}

/// One bin per attainable kDN level `0, 1/k, ..., 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessBins {
    pub k: usize,
    pub counts: Vec<usize>,
    /// Bin of every profiled instance.
    pub assignments: Vec<usize>,
}

impl HardnessBins {
    pub fn level(&self, bin: usize) -> f64 {
        bin as f64 / self.k as f64
    }
}

pub fn bin_by_hardness(test: &Dataset, reference: &Dataset, k: usize) -> Result<HardnessBins> {
    Ok(profile_against(test, reference, k)?.bins())
}

/// Per-bin accuracy; bins without instances are `None`.
pub fn accuracy_per_bin(
    predictions: &[usize],
    truth: &[usize],
    bins: &HardnessBins,
) -> Result<Vec<Option<f64>>> {
    Ok(BinTally::from_predictions(predictions, truth, bins)?.accuracy())
}

/// Per-bin totals and correct counts, additive across replications.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BinTally {
    pub total: Vec<usize>,
    pub correct: Vec<usize>,
}

impl BinTally {
    pub fn new(k: usize) -> Self {
        BinTally {
            total: vec![0; k + 1],
            correct: vec![0; k + 1],
        }
    }

    pub fn from_predictions(
        predictions: &[usize],
        truth: &[usize],
        bins: &HardnessBins,
    ) -> Result<Self> {
        if predictions.len() != truth.len() || truth.len() != bins.assignments.len() {
            return Err(Error::Dimension {
                expected: bins.assignments.len(),
                got: predictions.len().min(truth.len()),
            });
        }
        let mut tally = BinTally::new(bins.k);
        for ((p, t), &b) in predictions.iter().zip(truth).zip(&bins.assignments) {
            tally.total[b] += 1;
            if p == t {
                tally.correct[b] += 1;
            }
        }
        Ok(tally)
    }

    pub fn merge(&mut self, other: &BinTally) {
        if self.total.is_empty() {
            *self = other.clone();
            return;
        }
        for (a, b) in self.total.iter_mut().zip(&other.total) {
            *a += b;
        }
        for (a, b) in self.correct.iter_mut().zip(&other.correct) {
            *a += b;
        }
    }

    pub fn accuracy(&self) -> Vec<Option<f64>> {
        self.total
            .iter()
            .zip(&self.correct)
            .map(|(&t, &c)| (t > 0).then(|| c as f64 / t as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Knn,
    Ds,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingStats {
    pub knn: usize,
    pub ds: usize,
}

impl RoutingStats {
    pub fn ds_fraction(&self) -> f64 {
        let total = self.knn + self.ds;
        if total == 0 {
            0.0
        } else {
            self.ds as f64 / total as f64
        }
    }
}

/// Sends easy queries to K-NN and hard ones to a selection rule.
///
/// The test label is unknown at routing time, so hardness here is measured
/// against the neighbourhood's own majority: the fraction of the K
/// neighbours that disagree with the majority label.
#[derive(Debug, Clone)]
pub struct HybridClassifier {
    pub threshold: f64,
    pub technique: Technique,
    knn: KnnClassifier,
}

impl HybridClassifier {
    /// `threshold` must be finite and non-negative. Routing hardness is
    /// always below 1, so any threshold of 1 or more routes every query to
    /// K-NN.
    pub fn new(threshold: f64, technique: Technique, reference: Dataset, k: usize) -> Result<Self> {
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(Error::Config(format!(
                "hybrid threshold must be >= 0, got {threshold}"
            )));
        }
        Ok(HybridClassifier {
            threshold,
            technique,
            knn: KnnClassifier::new(reference, k)?,
        })
    }

    pub fn knn(&self) -> &KnnClassifier {
        &self.knn
    }

    /// `(routing hardness, majority label)` of the query's neighbourhood.
    pub fn routing_hardness(&self, query: &[f64]) -> Result<(f64, usize)> {
        let region = self.knn.neighbors(query)?;
        let tally = majority_vote(&region.labels, None, self.knn.reference().class_count())?;
        let agree = region.labels.iter().filter(|&&l| l == tally.winner).count();
        Ok((
            (region.len() - agree) as f64 / region.len() as f64,
            tally.winner,
        ))
    }

    pub fn classify(&self, query: &[f64], selector: &DynamicSelector) -> Result<(usize, Route)> {
        let (hardness, knn_label) = self.routing_hardness(query)?;
        if hardness < self.threshold {
            Ok((knn_label, Route::Knn))
        } else {
            Ok((selector.predict(self.technique, query)?, Route::Ds))
        }
    }

    pub fn classify_batch(
        &self,
        queries: &Dataset,
        selector: &DynamicSelector,
    ) -> Result<(Vec<usize>, Vec<Route>, RoutingStats)> {
        let mut labels = Vec::with_capacity(queries.len());
        let mut routes = Vec::with_capacity(queries.len());
        let mut stats = RoutingStats::default();
        for x in queries.rows() {
            let (label, route) = self.classify(x, selector)?;
            match route {
                Route::Knn => stats.knn += 1,
                Route::Ds => stats.ds += 1,
            }
            labels.push(label);
            routes.push(route);
        }
        Ok((labels, routes, stats))
    }
}

pub fn hybrid_classify(
    query: &[f64],
    hybrid: &HybridClassifier,
    selector: &DynamicSelector,
) -> Result<(usize, Route)> {
    hybrid.classify(query, selector)
}
