use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{generate_synthetic, ingest_csv, Dataset, LabelColumn, SplitSpec, SyntheticKind};
use crate::error::{Error, Result};
use crate::pool::PerceptronParams;
use crate::selector::{RuleParams, Technique};

pub const CONFIG_SCHEMA: &str = "dynsel-config/1";

/// Environment variable that overrides `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "DYNSEL_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub name: String,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Region-of-competence size, also used by kDN and the hybrid.
    pub k: usize,
    pub split: SplitConfig,
    pub pool: PoolConfig,
    pub rules: RulesConfig,
    pub techniques: Vec<Technique>,
    /// Neighbourhood sizes of the K-NN baselines.
    pub baselines: Vec<usize>,
    pub hardness: HardnessConfig,
    pub hybrid: HybridConfig,
    pub datasets: Vec<DatasetSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub dsel_fraction: f64,
    pub test_fraction: f64,
    pub replications: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        let s = SplitSpec::default();
        SplitConfig {
            train_fraction: s.train_fraction,
            dsel_fraction: s.dsel_fraction,
            test_fraction: s.test_fraction,
            replications: s.replications,
        }
    }
}

impl SplitConfig {
    pub fn spec(&self, seed: u64) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            dsel_fraction: self.dsel_fraction,
            test_fraction: self.test_fraction,
            seed,
            replications: self.replications,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoolConfig {
    pub size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for PoolConfig {
    fn default() -> Self {
        let p = PerceptronParams::default();
        PoolConfig {
            size: 100,
            learning_rate: p.learning_rate,
            epochs: p.epochs,
        }
    }
}

impl PoolConfig {
    pub fn perceptron(&self) -> PerceptronParams {
        PerceptronParams {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RulesConfig {
    pub mcb_threshold: f64,
    pub selection_margin: f64,
    pub n_frac: f64,
    pub j_frac: f64,
    pub clusters: usize,
}

impl Default for RulesConfig {
    fn default() -> Self {
        let r = RuleParams::default();
        RulesConfig {
            mcb_threshold: r.mcb_threshold,
            selection_margin: r.selection_margin,
            n_frac: r.n_frac,
            j_frac: r.j_frac,
            clusters: r.clusters,
        }
    }
}

/// Which labelled set test-instance kDN is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HardnessReference {
    /// Training and DSEL partitions together (the K-NN baselines' data).
    #[serde(rename = "train+dsel")]
    TrainDsel,
    #[serde(rename = "dsel")]
    Dsel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardnessConfig {
    pub enabled: bool,
    pub reference: HardnessReference,
}

impl Default for HardnessConfig {
    fn default() -> Self {
        HardnessConfig {
            enabled: true,
            reference: HardnessReference::TrainDsel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HybridConfig {
    pub enabled: bool,
    pub threshold: f64,
    pub technique: Technique,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            enabled: true,
            threshold: 0.4,
            technique: Technique::KnoraU,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSource {
    Csv {
        path: PathBuf,
        #[serde(default)]
        label_column: LabelColumn,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Synthetic {
        generator: SyntheticKind,
        n: usize,
        noise: f64,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
}

impl DatasetSource {
    pub fn name(&self) -> String {
        match self {
            DatasetSource::Csv { name: Some(n), .. }
            | DatasetSource::Synthetic { name: Some(n), .. } => n.clone(),
            DatasetSource::Csv { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            DatasetSource::Synthetic {
                generator, noise, ..
            } => format!("{generator}-{noise}"),
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        let ds = match self {
            DatasetSource::Csv {
                path, label_column, ..
            } => {
                let ingested = ingest_csv(path, label_column)?;
                if ingested.rejected_rows > 0 {
                    log::warn!(
                        "{}: dropped {} incomplete rows",
                        path.display(),
                        ingested.rejected_rows
                    );
                }
                ingested.dataset
            }
            DatasetSource::Synthetic {
                generator,
                n,
                noise,
                seed,
                ..
            } => generate_synthetic(*generator, *n, *noise, *seed)?,
        };
        Ok(ds.with_name(self.name()))
    }

    fn resolve(&mut self, base: &Path) {
        if let DatasetSource::Csv { path, .. } = self {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema: CONFIG_SCHEMA.into(),
            name: "experiment".into(),
            master_seed: 0,
            output_dir: PathBuf::from("reports"),
            k: 7,
            split: SplitConfig::default(),
            pool: PoolConfig::default(),
            rules: RulesConfig::default(),
            techniques: Technique::ALL.to_vec(),
            baselines: vec![1, 7],
            hardness: HardnessConfig::default(),
            hybrid: HybridConfig::default(),
            datasets: Vec::new(),
        }
    }
}

/// The synthetic half of the bundled presets.
fn synthetic_sources(n: usize) -> Vec<DatasetSource> {
    [
        (SyntheticKind::Banana, 0.15, 11),
        (SyntheticKind::Banana, 0.3, 12),
        (SyntheticKind::Lithuanian, 0.2, 13),
        (SyntheticKind::Lithuanian, 0.35, 14),
        (SyntheticKind::Moons, 0.3, 15),
    ]
    .into_iter()
    .map(|(generator, noise, seed)| DatasetSource::Synthetic {
        generator,
        n,
        noise,
        seed,
        name: None,
    })
    .collect()
}

/// The CSV fixtures shipped under `data/`.
pub const FIXTURES: [&str; 5] = ["wine", "iris", "wdbc", "anes96", "fair"];

fn fixture_sources(data_dir: &Path) -> Vec<DatasetSource> {
    FIXTURES
        .iter()
        .map(|name| DatasetSource::Csv {
            path: data_dir.join(format!("{name}.csv")),
            label_column: LabelColumn::Name("class".into()),
            name: None,
        })
        .collect()
}

impl ExperimentConfig {
    /// Small preset for quick runs: 5 replications, 25 perceptrons.
    pub fn desk(data_dir: impl AsRef<Path>) -> Self {
        let mut datasets = synthetic_sources(600);
        datasets.extend(fixture_sources(data_dir.as_ref()));
        ExperimentConfig {
            name: "desk".into(),
            master_seed: 20240601,
            split: SplitConfig {
                replications: 5,
                ..SplitConfig::default()
            },
            pool: PoolConfig {
                size: 25,
                ..PoolConfig::default()
            },
            datasets,
            ..ExperimentConfig::default()
        }
    }

    /// Full protocol: 20 replications, 100 perceptrons, 1000-point synthetic sets.
    pub fn full(data_dir: impl AsRef<Path>) -> Self {
        let mut datasets = synthetic_sources(1000);
        datasets.extend(fixture_sources(data_dir.as_ref()));
        ExperimentConfig {
            name: "full".into(),
            master_seed: 20240601,
            datasets,
            ..ExperimentConfig::default()
        }
    }

    pub fn rule_params(&self) -> RuleParams {
        RuleParams {
            k: self.k,
            mcb_threshold: self.rules.mcb_threshold,
            selection_margin: self.rules.selection_margin,
            n_frac: self.rules.n_frac,
            j_frac: self.rules.j_frac,
            clusters: self.rules.clusters,
        }
    }

    /// Column labels in report order: techniques, then K-NN baselines.
    pub fn columns(&self) -> Vec<String> {
        self.techniques
            .iter()
            .map(|t| t.label().to_string())
            .chain(self.baselines.iter().map(|k| baseline_label(*k)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::Config(format!(
                "unsupported schema `{}`",
                self.schema
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.pool.size == 0 {
            return Err(Error::Config("pool.size must be at least 1".into()));
        }
        if self.techniques.is_empty() && self.baselines.is_empty() {
            return Err(Error::Config("the roster is empty".into()));
        }
        if self.baselines.contains(&0) {
            return Err(Error::Config(
                "baseline neighbourhood sizes must be positive".into(),
            ));
        }
        if self.datasets.is_empty() {
            return Err(Error::Config("no datasets configured".into()));
        }
        self.split.spec(0).validate()?;
        self.rule_params().validate()?;
        let mut seen = HashSet::new();
        for ds in &self.datasets {
            if !seen.insert(ds.name()) {
                return Err(Error::Config(format!(
                    "duplicate dataset name `{}`",
                    ds.name()
                )));
            }
        }
        let mut cols = HashSet::new();
        for c in self.columns() {
            if !cols.insert(c.clone()) {
                return Err(Error::Config(format!("duplicate roster entry `{c}`")));
            }
        }
        if self.hybrid.threshold.is_nan() || self.hybrid.threshold < 0.0 {
            return Err(Error::Config(
                "hybrid.threshold must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Reads a config file; relative dataset paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for ds in &mut cfg.datasets {
            ds.resolve(base);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }
}

pub fn baseline_label(k: usize) -> String {
    format!("{k}-NN")
}
