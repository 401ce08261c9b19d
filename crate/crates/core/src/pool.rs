//! Base learners and pool generation.
//!
//! Pool members are one-vs-rest linear perceptrons trained on bootstrap
//! resamples of the training partition. The [`OracleMatrix`] caches every
//! member's behaviour on the dynamic-selection set; all competence
//! estimates read from it.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seed;

pub const POOL_SCHEMA: &str = "dynsel-pool/1";
const MAX_BAG_RETRIES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerceptronParams {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for PerceptronParams {
    fn default() -> Self {
        PerceptronParams {
            learning_rate: 1.0,
            epochs: 100,
        }
    }
}

/// One weight row and bias per class; predicts the argmax activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    class_count: usize,
    n_features: usize,
    /// Row-major `class_count × n_features`.
    weights: Vec<f64>,
    bias: Vec<f64>,
    pub params: PerceptronParams,
    pub seed: u64,
    /// Number of epochs actually run.
    pub epochs_run: usize,
}

/// Index of the largest value, first index on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

impl LinearClassifier {
    pub fn from_parts(
        class_count: usize,
        n_features: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        if weights.len() != class_count * n_features {
            return Err(Error::Dimension {
                expected: class_count * n_features,
                got: weights.len(),
            });
        }
        if bias.len() != class_count {
            return Err(Error::Dimension {
                expected: class_count,
                got: bias.len(),
            });
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite classifier weight".into()));
        }
        Ok(LinearClassifier {
            class_count,
            n_features,
            weights,
            bias,
            params: PerceptronParams::default(),
            seed: 0,
            epochs_run: 0,
        })
    }

    /// Predicts `class` for every input.
    pub fn constant(class: usize, class_count: usize, n_features: usize) -> Self {
        let mut bias = vec![0.0; class_count];
        bias[class] = 1.0;
        LinearClassifier {
            class_count,
            n_features,
            weights: vec![0.0; class_count * n_features],
            bias,
            params: PerceptronParams::default(),
            seed: 0,
            epochs_run: 0,
        }
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn activation(&self, class: usize, x: &[f64]) -> f64 {
        let w = &self.weights[class * self.n_features..(class + 1) * self.n_features];
        w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.bias[class]
    }

    pub fn activations(&self, x: &[f64]) -> Vec<f64> {
        (0..self.class_count)
            .map(|c| self.activation(c, x))
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.activations(x))
    }

    /// Softmax of the activations.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let act = self.activations(x);
        let max = act.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = act.iter().map(|a| (a - max).exp()).collect();
        let sum: f64 = exp.iter().sum();
        exp.into_iter().map(|e| e / sum).collect()
    }
}

/// Mistake-driven one-vs-rest perceptron.
///
/// Each epoch visits the rows in a seeded shuffle; row `c` is updated with
/// target `+1` for class `c` and `-1` otherwise whenever `t * activation <= 0`.
/// Training stops early once an epoch ends with zero argmax errors. A
/// training set holding a single class yields a constant classifier.
pub fn train_perceptron(
    train: &Dataset,
    params: &PerceptronParams,
    seed_value: u64,
) -> LinearClassifier {
    let m = train.class_count();
    let d = train.n_features();
    let first = train.labels().first().copied().unwrap_or(0);
    if train.labels().iter().all(|&l| l == first) {
        let mut c = LinearClassifier::constant(first, m, d);
        c.params = *params;
        c.seed = seed_value;
        return c;
    }

    let mut clf = LinearClassifier {
        class_count: m,
        n_features: d,
        weights: vec![0.0; m * d],
        bias: vec![0.0; m],
        params: *params,
        seed: seed_value,
        epochs_run: 0,
    };
    let lr = params.learning_rate;
    let mut rng = seed::rng(seed_value);
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let x = train.row(i);
            let y = train.label(i);
            for c in 0..m {
                let t = if c == y { 1.0 } else { -1.0 };
                if t * clf.activation(c, x) <= 0.0 {
                    let w = &mut clf.weights[c * d..(c + 1) * d];
                    for (wj, xj) in w.iter_mut().zip(x) {
                        *wj += lr * t * xj;
                    }
                    clf.bias[c] += lr * t;
                }
            }
        }
        clf.epochs_run = epoch + 1;
        let errors = (0..train.len())
            .filter(|&i| clf.predict(train.row(i)) != train.label(i))
            .count();
        if errors == 0 {
            break;
        }
    }
    clf
}

/// Bootstrap indices and perceptron seed for attempt `attempt` of a bag.
pub fn bag_sample(bag_seed: u64, attempt: usize, n: usize) -> (Vec<usize>, u64) {
    let mut rng = seed::rng(seed::derive(bag_seed, 2 * attempt as u64));
    let indices = (0..n).map(|_| rng.random_range(0..n)).collect();
    (indices, seed::derive(bag_seed, 2 * attempt as u64 + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierPool {
    pub schema: String,
    members: Vec<LinearClassifier>,
    pub bag_seeds: Vec<u64>,
    pub bag_size: usize,
    pub seed: u64,
    /// Members that fell back to a constant classifier after every resample
    /// drew a single class.
    pub degenerate_bags: Vec<usize>,
}

impl ClassifierPool {
    pub fn from_members(members: Vec<LinearClassifier>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::Empty("pool has no members".into()));
        };
        let (m, d) = (first.class_count, first.n_features);
        if members
            .iter()
            .any(|c| c.class_count != m || c.n_features != d)
        {
            return Err(Error::InvalidDataset(
                "pool members disagree on shape".into(),
            ));
        }
        Ok(ClassifierPool {
            schema: POOL_SCHEMA.into(),
            bag_seeds: vec![0; members.len()],
            members,
            bag_size: 0,
            seed: 0,
            degenerate_bags: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[LinearClassifier] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &LinearClassifier {
        &self.members[i]
    }

    pub fn class_count(&self) -> usize {
        self.members[0].class_count
    }

    pub fn n_features(&self) -> usize {
        self.members[0].n_features
    }

    /// Every member's hard prediction for `x`.
    pub fn predict_all(&self, x: &[f64]) -> Vec<usize> {
        self.members.iter().map(|c| c.predict(x)).collect()
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let pool: ClassifierPool = serde_json::from_str(&text)?;
        if pool.schema != POOL_SCHEMA {
            return Err(Error::Serialization(format!(
                "unsupported pool schema `{}`",
                pool.schema
            )));
        }
        if pool.members.is_empty() {
            return Err(Error::Empty("pool has no members".into()));
        }
        Ok(pool)
    }
}

/// Trains `pool_size` perceptrons on independent bootstrap resamples of `train`.
pub fn bagging_generate(
    train: &Dataset,
    pool_size: usize,
    params: &PerceptronParams,
    seed_value: u64,
) -> Result<ClassifierPool> {
    if pool_size == 0 {
        return Err(Error::Config("pool_size must be at least 1".into()));
    }
    if train.is_empty() {
        return Err(Error::Empty("training set is empty".into()));
    }
    let n = train.len();
    let trained: Vec<(LinearClassifier, u64, bool)> = (0..pool_size)
        .into_par_iter()
        .map(|i| {
            let bag_seed = seed::derive(seed_value, i as u64);
            for attempt in 0..=MAX_BAG_RETRIES {
                let (indices, train_seed) = bag_sample(bag_seed, attempt, n);
                let bag = train.subset(&indices);
                let first = bag.label(0);
                let single = bag.labels().iter().all(|&l| l == first);
                if !single || attempt == MAX_BAG_RETRIES {
                    if single {
                        log::warn!("bag {i} drew a single class after {MAX_BAG_RETRIES} retries; using a constant classifier");
                    }
                    return (train_perceptron(&bag, params, train_seed), bag_seed, single);
                }
            }
            unreachable!("final attempt always returns")
        })
        .collect();

    let mut pool = ClassifierPool {
        schema: POOL_SCHEMA.into(),
        members: Vec::with_capacity(pool_size),
        bag_seeds: Vec::with_capacity(pool_size),
        bag_size: n,
        seed: seed_value,
        degenerate_bags: Vec::new(),
    };
    for (i, (clf, bag_seed, degenerate)) in trained.into_iter().enumerate() {
        pool.members.push(clf);
        pool.bag_seeds.push(bag_seed);
        if degenerate {
            pool.degenerate_bags.push(i);
        }
    }
    Ok(pool)
}

/// Every pool member's behaviour on every DSEL sample.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMatrix {
    pool_size: usize,
    n_samples: usize,
    class_count: usize,
    labels: Vec<usize>,
    predictions: Vec<usize>,
    correctness: Vec<bool>,
    soft: Vec<f64>,
}

impl OracleMatrix {
    /// Builds a matrix from explicit per-classifier predictions over DSEL.
    ///
    /// `soft`, when given, is indexed `[classifier][sample][class]`; otherwise
    /// each prediction becomes a one-hot distribution.
    pub fn from_parts(
        labels: Vec<usize>,
        predictions: Vec<Vec<usize>>,
        soft: Option<Vec<Vec<Vec<f64>>>>,
        class_count: usize,
    ) -> Result<Self> {
        let p = predictions.len();
        let n = labels.len();
        if p == 0 {
            return Err(Error::Empty(
                "oracle matrix needs at least one classifier".into(),
            ));
        }
        let mut flat_pred = Vec::with_capacity(p * n);
        for row in &predictions {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            flat_pred.extend_from_slice(row);
        }
        if flat_pred.iter().chain(&labels).any(|&c| c >= class_count) {
            return Err(Error::InvalidDataset("class index out of range".into()));
        }
        let correctness = (0..p * n).map(|j| flat_pred[j] == labels[j % n]).collect();
        let flat_soft = match soft {
            Some(s) => {
                let mut out = Vec::with_capacity(p * n * class_count);
                if s.len() != p {
                    return Err(Error::Dimension {
                        expected: p,
                        got: s.len(),
                    });
                }
                for per_sample in s {
                    if per_sample.len() != n {
                        return Err(Error::Dimension {
                            expected: n,
                            got: per_sample.len(),
                        });
                    }
                    for dist in per_sample {
                        if dist.len() != class_count {
                            return Err(Error::Dimension {
                                expected: class_count,
                                got: dist.len(),
                            });
                        }
                        if (dist.iter().sum::<f64>() - 1.0).abs() > 1e-9
                            || dist.iter().any(|v| *v < 0.0)
                        {
                            return Err(Error::InvalidDataset(
                                "soft output is not a distribution".into(),
                            ));
                        }
                        out.extend(dist);
                    }
                }
                out
            }
            None => flat_pred
                .iter()
                .flat_map(|&c| (0..class_count).map(move |j| if j == c { 1.0 } else { 0.0 }))
                .collect(),
        };
        Ok(OracleMatrix {
            pool_size: p,
            n_samples: n,
            class_count,
            labels,
            predictions: flat_pred,
            correctness,
            soft: flat_soft,
        })
    }

    pub fn pool_size(&self) -> usize {
        self.pool_size
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn prediction(&self, classifier: usize, sample: usize) -> usize {
        self.predictions[classifier * self.n_samples + sample]
    }

    pub fn is_correct(&self, classifier: usize, sample: usize) -> bool {
        self.correctness[classifier * self.n_samples + sample]
    }

    pub fn correctness_row(&self, classifier: usize) -> &[bool] {
        &self.correctness[classifier * self.n_samples..(classifier + 1) * self.n_samples]
    }

    pub fn proba(&self, classifier: usize, sample: usize) -> &[f64] {
        let start = (classifier * self.n_samples + sample) * self.class_count;
        &self.soft[start..start + self.class_count]
    }

    /// Output profile of DSEL sample `sample`: every member's prediction.
    pub fn profile(&self, sample: usize) -> Vec<usize> {
        (0..self.pool_size)
            .map(|i| self.prediction(i, sample))
            .collect()
    }

    /// Fraction of DSEL samples classifier `i` gets right.
    pub fn accuracy(&self, classifier: usize) -> f64 {
        let row = self.correctness_row(classifier);
        row.iter().filter(|&&c| c).count() as f64 / row.len() as f64
    }
}

pub fn build_oracle_matrix(pool: &ClassifierPool, dsel: &Dataset) -> Result<OracleMatrix> {
    if dsel.n_features() != pool.n_features() {
        return Err(Error::Dimension {
            expected: pool.n_features(),
            got: dsel.n_features(),
        });
    }
    let (p, n, m) = (pool.len(), dsel.len(), pool.class_count());
    let mut predictions = Vec::with_capacity(p * n);
    let mut correctness = Vec::with_capacity(p * n);
    let mut soft = Vec::with_capacity(p * n * m);
    for clf in pool.members() {
        for (x, &y) in dsel.rows().zip(dsel.labels()) {
            let proba = clf.predict_proba(x);
            let pred = clf.predict(x);
            predictions.push(pred);
            correctness.push(pred == y);
            soft.extend(proba);
        }
    }
    Ok(OracleMatrix {
        pool_size: p,
        n_samples: n,
        class_count: m,
        labels: dsel.labels().to_vec(),
        predictions,
        correctness,
        soft,
    })
}
