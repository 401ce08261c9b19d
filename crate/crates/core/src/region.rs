//! Regions of competence: exact K-NN over DSEL in feature space or in
//! output-profile space, and k-means partitions of DSEL.

use std::cmp::Ordering;

use rand::Rng as _;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::pool::{ClassifierPool, OracleMatrix};
use crate::seed;

/// The `k` nearest reference samples of a query, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionOfCompetence {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
    pub labels: Vec<usize>,
}

impl RegionOfCompetence {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The first `k` neighbours.
    pub fn truncated(&self, k: usize) -> RegionOfCompetence {
        let k = k.min(self.len());
        RegionOfCompetence {
            indices: self.indices[..k].to_vec(),
            distances: self.distances[..k].to_vec(),
            labels: self.labels[..k].to_vec(),
        }
    }

    /// Correctness of `classifier` on each neighbour, in region order.
    pub fn correctness<'a>(
        &'a self,
        oracle: &'a OracleMatrix,
        classifier: usize,
    ) -> impl Iterator<Item = bool> + 'a {
        self.indices
            .iter()
            .map(move |&k| oracle.is_correct(classifier, k))
    }

    /// Number of neighbours `classifier` gets right.
    pub fn correct_count(&self, oracle: &OracleMatrix, classifier: usize) -> usize {
        self.correctness(oracle, classifier).filter(|&c| c).count()
    }

    fn from_ranked(ranked: Vec<(f64, usize)>, labels: &[usize]) -> Self {
        RegionOfCompetence {
            labels: ranked.iter().map(|&(_, i)| labels[i]).collect(),
            distances: ranked.iter().map(|&(d, _)| d).collect(),
            indices: ranked.into_iter().map(|(_, i)| i).collect(),
        }
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// `k` smallest `(distance, index)` pairs, sorted ascending with index tie-break.
fn smallest_k(mut scored: Vec<(f64, usize)>, k: usize) -> Vec<(f64, usize)> {
    if k < scored.len() {
        scored.select_nth_unstable_by(k, by_distance_then_index);
        scored.truncate(k);
    }
    scored.sort_by(by_distance_then_index);
    scored
}

/// Exact Euclidean K-NN of `query` among the rows of `reference`, optionally
/// skipping one row (used when the query is itself a reference member).
pub fn nearest_neighbors(
    query: &[f64],
    reference: &Dataset,
    k: usize,
    exclude: Option<usize>,
) -> Result<RegionOfCompetence> {
    if query.len() != reference.n_features() {
        return Err(Error::Dimension {
            expected: reference.n_features(),
            got: query.len(),
        });
    }
    let available = reference.len() - usize::from(exclude.is_some_and(|e| e < reference.len()));
    if k > available {
        return Err(Error::NeighborhoodTooLarge { k, available });
    }
    let scored: Vec<(f64, usize)> = reference
        .rows()
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(i, row)| (squared_distance(query, row), i))
        .collect();
    let mut ranked = smallest_k(scored, k);
    for r in &mut ranked {
        r.0 = r.0.sqrt();
    }
    Ok(RegionOfCompetence::from_ranked(ranked, reference.labels()))
}

/// Region of competence of `query` in DSEL.
pub fn knn_region(query: &[f64], dsel: &Dataset, k: usize) -> Result<RegionOfCompetence> {
    nearest_neighbors(query, dsel, k, None)
}

/// Every pool member's hard prediction for `sample`.
pub fn output_profile(sample: &[f64], pool: &ClassifierPool) -> Vec<usize> {
    pool.predict_all(sample)
}

/// Fraction of positions on which two output profiles agree.
pub fn profile_similarity(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
    Ok(same as f64 / a.len() as f64)
}

/// K nearest DSEL samples in output-profile space.
///
/// Profiles are compared as concatenated one-hot vectors, so the Euclidean
/// distance is `sqrt(2 * disagreements)`.
pub fn profile_region(
    query_profile: &[usize],
    oracle: &OracleMatrix,
    k: usize,
) -> Result<RegionOfCompetence> {
    if query_profile.len() != oracle.pool_size() {
        return Err(Error::Dimension {
            expected: oracle.pool_size(),
            got: query_profile.len(),
        });
    }
    let n = oracle.n_samples();
    if k > n {
        return Err(Error::NeighborhoodTooLarge { k, available: n });
    }
    let mut disagreements = vec![0usize; n];
    for (i, &q) in query_profile.iter().enumerate() {
        for (s, d) in disagreements.iter_mut().enumerate() {
            if oracle.prediction(i, s) != q {
                *d += 1;
            }
        }
    }
    let scored = disagreements
        .into_iter()
        .enumerate()
        .map(|(s, d)| (2.0 * d as f64, s))
        .collect();
    let mut ranked = smallest_k(scored, k);
    for r in &mut ranked {
        r.0 = r.0.sqrt();
    }
    Ok(RegionOfCompetence::from_ranked(ranked, oracle.labels()))
}

/// Unweighted K-NN majority vote; ties go to the lowest class index.
///
/// This is the baseline classifier and also the K-NN side of the hybrid, so
/// both share the metric and tie rules of the region of competence.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnClassifier {
    reference: Dataset,
    k: usize,
}

impl KnnClassifier {
    pub fn new(reference: Dataset, k: usize) -> Result<Self> {
        if k == 0 || k > reference.len() {
            return Err(Error::NeighborhoodTooLarge {
                k,
                available: reference.len(),
            });
        }
        Ok(KnnClassifier { reference, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn reference(&self) -> &Dataset {
        &self.reference
    }

    pub fn neighbors(&self, query: &[f64]) -> Result<RegionOfCompetence> {
        nearest_neighbors(query, &self.reference, self.k, None)
    }

    pub fn predict(&self, query: &[f64]) -> Result<usize> {
        let region = self.neighbors(query)?;
        Ok(crate::des::majority_vote(&region.labels, None, self.reference.class_count())?.winner)
    }
}

pub const KMEANS_MAX_ITER: usize = 300;
pub const KMEANS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub centroids: Vec<Vec<f64>>,
    /// DSEL row indices per cluster.
    pub members: Vec<Vec<usize>>,
    pub assignments: Vec<usize>,
    /// Inertia after each assignment step.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn nearest_cluster(&self, query: &[f64]) -> usize {
        nearest_centroid(&self.centroids, query).0
    }

    pub fn inertia(&self, data: &Dataset) -> f64 {
        data.rows()
            .zip(&self.assignments)
            .map(|(x, &c)| squared_distance(x, &self.centroids[c]))
            .sum()
    }
}

fn nearest_centroid(centroids: &[Vec<f64>], x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn kmeans_plus_plus(data: &Dataset, k: usize, rng: &mut seed::Rng) -> Vec<Vec<f64>> {
    let n = data.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = data
        .rows()
        .map(|x| squared_distance(x, data.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // Every remaining point coincides with a centre.
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(next);
        for (i, x) in data.rows().enumerate() {
            d2[i] = d2[i].min(squared_distance(x, data.row(next)));
        }
    }
    chosen.into_iter().map(|i| data.row(i).to_vec()).collect()
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// Runs until no centroid moves more than [`KMEANS_TOL`] or for
/// [`KMEANS_MAX_ITER`] iterations. A cluster left empty is reseeded with the
/// point farthest from its current centroid.
pub fn kmeans_fit(data: &Dataset, k: usize, seed_value: u64) -> Result<ClusterModel> {
    let n = data.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!(
            "cluster count {k} must be in 1..={n}"
        )));
    }
    let d = data.n_features();
    let mut rng = seed::rng(seed_value);
    let mut centroids = kmeans_plus_plus(data, k, &mut rng);
    let mut assignments = vec![0usize; n];
    let mut inertia_history = Vec::new();
    let mut iterations = 0;

    while iterations < KMEANS_MAX_ITER {
        iterations += 1;
        let mut dist = vec![0.0; n];
        for (i, x) in data.rows().enumerate() {
            let (j, d2) = nearest_centroid(&centroids, x);
            assignments[i] = j;
            dist[i] = d2;
        }
        let mut sizes = vec![0usize; k];
        for &a in &assignments {
            sizes[a] += 1;
        }
        for j in 0..k {
            if sizes[j] > 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| sizes[assignments[i]] > 1)
                .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)));
            if let Some(i) = far {
                sizes[assignments[i]] -= 1;
                assignments[i] = j;
                sizes[j] = 1;
                dist[i] = 0.0;
                centroids[j] = data.row(i).to_vec();
            }
        }
        inertia_history.push(dist.iter().sum());

        let mut sums = vec![vec![0.0; d]; k];
        for (x, &a) in data.rows().zip(&assignments) {
            for (s, v) in sums[a].iter_mut().zip(x) {
                *s += v;
            }
        }
        let mut shift = 0.0f64;
        for j in 0..k {
            let updated: Vec<f64> = sums[j].iter().map(|s| s / sizes[j] as f64).collect();
            shift = shift.max(squared_distance(&updated, &centroids[j]).sqrt());
            centroids[j] = updated;
        }
        if shift < KMEANS_TOL {
            break;
        }
    }

    let mut members = vec![Vec::new(); k];
    for (i, &a) in assignments.iter().enumerate() {
        members[a].push(i);
    }
    Ok(ClusterModel {
        centroids,
        members,
        assignments,
        inertia_history,
        iterations,
    })
}
