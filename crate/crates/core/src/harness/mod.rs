//! Replicated experiments: split, standardize, train a pool, evaluate every
//! rule plus K-NN baselines, and aggregate into a report.

mod config;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{
    baseline_label, DatasetSource, ExperimentConfig, HardnessConfig, HardnessReference,
    HybridConfig, PoolConfig, RulesConfig, SplitConfig, CONFIG_SCHEMA, FIXTURES, OUTPUT_DIR_ENV,
};
pub use report::{
    compare_reports, render_markdown, report_render, DatasetFailure, ExperimentReport, Provenance,
    ReportFormat, REPORT_SCHEMA,
};

use crate::data::{apply_standardizer, fit_standardizer, stratified_split, Dataset};
use crate::error::Result;
use crate::hardness::{bin_by_hardness, BinTally, HybridClassifier, RoutingStats};
use crate::pool::bagging_generate;
use crate::region::KnnClassifier;
use crate::seed::{derive, stream_of};
use crate::selector::DynamicSelector;

/// One replication on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub split_seed: u64,
    pub pool_seed: u64,
    /// Test accuracy (percent) per report column.
    pub accuracies: Vec<f64>,
    /// Per-column tallies over kDN bins of the test queries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardness: Option<Vec<BinTally>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hybrid: Option<HybridRecord>,
    /// Bags that stayed single-class after every retry.
    pub degenerate_bags: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridRecord {
    pub threshold: f64,
    /// Percent accuracy of the hybrid and of each route used alone.
    pub accuracy: f64,
    pub ds_accuracy: f64,
    pub knn_accuracy: f64,
    pub routing: RoutingStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetResult {
    pub name: String,
    pub n_samples: usize,
    pub n_features: usize,
    pub class_count: usize,
    pub replications: Vec<ReplicationRecord>,
    /// Per-column mean and sample standard deviation across replications.
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Bin tallies merged over replications, per column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardness: Option<Vec<BinTally>>,
}

impl DatasetResult {
    /// Hybrid records of every replication, if the hybrid ran.
    pub fn hybrid(&self) -> Vec<&HybridRecord> {
        self.replications
            .iter()
            .filter_map(|r| r.hybrid.as_ref())
            .collect()
    }
}

fn percent(predictions: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p == t)
        .count();
    100.0 * hits as f64 / truth.len() as f64
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Seed of everything random about `name`; independent of dataset order.
pub fn dataset_seed(master_seed: u64, name: &str) -> u64 {
    derive(master_seed, stream_of(name))
}

pub fn run_replication(
    ds: &Dataset,
    config: &ExperimentConfig,
    replication: usize,
) -> Result<ReplicationRecord> {
    let base = dataset_seed(config.master_seed, ds.name());
    let split_seed = derive(base, 0);
    let pool_seed = derive(derive(base, 1), replication as u64);

    let parts = stratified_split(ds, &config.split.spec(split_seed), replication)?;
    let stats = fit_standardizer(&parts.train)?;
    let train = apply_standardizer(&stats, &parts.train)?;
    let dsel = apply_standardizer(&stats, &parts.dsel)?;
    let test = apply_standardizer(&stats, &parts.test)?;
    let merged = train.concat(&dsel)?;

    let pool = bagging_generate(
        &train,
        config.pool.size,
        &config.pool.perceptron(),
        pool_seed,
    )?;
    let degenerate_bags = pool.degenerate_bags.len();
    let selector = DynamicSelector::new(pool, dsel.clone(), config.rule_params())?;

    let mut predictions: Vec<Vec<usize>> =
        vec![Vec::with_capacity(test.len()); config.techniques.len()];
    for query in test.rows() {
        let prepared = selector.prepare(query)?;
        for (t, technique) in config.techniques.iter().enumerate() {
            predictions[t].push(
                selector
                    .classify_prepared(*technique, &prepared)?
                    .predicted_label,
            );
        }
    }
    for &k in &config.baselines {
        let knn = KnnClassifier::new(merged.clone(), k)?;
        predictions.push(test.rows().map(|q| knn.predict(q)).collect::<Result<_>>()?);
    }
    let accuracies = predictions
        .iter()
        .map(|p| percent(p, test.labels()))
        .collect();

    let hardness = if config.hardness.enabled {
        let reference = match config.hardness.reference {
            HardnessReference::TrainDsel => &merged,
            HardnessReference::Dsel => &dsel,
        };
        let bins = bin_by_hardness(&test, reference, config.k)?;
        Some(
            predictions
                .iter()
                .map(|p| BinTally::from_predictions(p, test.labels(), &bins))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };

    let hybrid = if config.hybrid.enabled {
        let h = HybridClassifier::new(
            config.hybrid.threshold,
            config.hybrid.technique,
            merged.clone(),
            config.k,
        )?;
        let (labels, _, routing) = h.classify_batch(&test, &selector)?;
        let ds_only: Vec<usize> = test
            .rows()
            .map(|q| selector.predict(config.hybrid.technique, q))
            .collect::<Result<_>>()?;
        let knn_only: Vec<usize> = test
            .rows()
            .map(|q| h.knn().predict(q))
            .collect::<Result<_>>()?;
        Some(HybridRecord {
            threshold: config.hybrid.threshold,
            accuracy: percent(&labels, test.labels()),
            ds_accuracy: percent(&ds_only, test.labels()),
            knn_accuracy: percent(&knn_only, test.labels()),
            routing,
        })
    } else {
        None
    };

    Ok(ReplicationRecord {
        replication,
        split_seed,
        pool_seed,
        accuracies,
        hardness,
        hybrid,
        degenerate_bags,
    })
}

/// Runs every replication of one dataset and aggregates them.
pub fn run_dataset(ds: &Dataset, config: &ExperimentConfig) -> Result<DatasetResult> {
    let replications: Vec<ReplicationRecord> = (0..config.split.replications)
        .into_par_iter()
        .map(|r| run_replication(ds, config, r))
        .collect::<Result<_>>()?;
    let columns = config.columns().len();
    let (mean, std) = (0..columns)
        .map(|c| {
            mean_std(
                &replications
                    .iter()
                    .map(|r| r.accuracies[c])
                    .collect::<Vec<_>>(),
            )
        })
        .unzip();
    let hardness = config.hardness.enabled.then(|| {
        let mut merged = vec![BinTally::new(config.k); columns];
        for rec in &replications {
            if let Some(tallies) = &rec.hardness {
                for (m, t) in merged.iter_mut().zip(tallies) {
                    m.merge(t);
                }
            }
        }
        merged
    });
    Ok(DatasetResult {
        name: ds.name().to_string(),
        n_samples: ds.len(),
        n_features: ds.n_features(),
        class_count: ds.class_count(),
        replications,
        mean,
        std,
        hardness,
    })
}

/// Runs the whole sweep. A dataset that fails to load or run is recorded in
/// `failures` and the rest of the sweep continues.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let outcomes: Vec<std::result::Result<DatasetResult, DatasetFailure>> = config
        .datasets
        .par_iter()
        .map(|source| {
            let name = source.name();
            let run = source.load().and_then(|ds| run_dataset(&ds, config));
            if run.is_ok() {
                log::info!("dataset `{name}` done");
            }
            run.map_err(|e| {
                log::warn!("dataset `{name}` failed: {e}");
                DatasetFailure {
                    dataset: name,
                    kind: e.kind().to_string(),
                    message: e.to_string(),
                }
            })
        })
        .collect();
    let mut datasets = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(d) => datasets.push(d),
            Err(f) => failures.push(f),
        }
    }
    ExperimentReport::assemble(config.clone(), datasets, failures)
}
