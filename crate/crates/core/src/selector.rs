//! Technique roster and a fitted selector that answers queries with any rule.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::dcs;
use crate::des::{self, ClusterEnsembles};
use crate::error::{Error, Result};
use crate::pool::{build_oracle_matrix, ClassifierPool, OracleMatrix};
use crate::region::{knn_region, RegionOfCompetence};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Technique {
    #[serde(rename = "ola")]
    Ola,
    #[serde(rename = "lca")]
    Lca,
    #[serde(rename = "mla")]
    Mla,
    #[serde(rename = "rank")]
    Rank,
    #[serde(rename = "mcb")]
    Mcb,
    #[serde(rename = "apriori")]
    APriori,
    #[serde(rename = "aposteriori")]
    APosteriori,
    #[serde(rename = "knora-e")]
    KnoraE,
    #[serde(rename = "knora-u")]
    KnoraU,
    #[serde(rename = "knop")]
    Knop,
    #[serde(rename = "des-p")]
    DesP,
    #[serde(rename = "des-kl")]
    DesKl,
    #[serde(rename = "des-knn")]
    DesKnn,
    #[serde(rename = "des-clustering")]
    DesClustering,
}

impl Technique {
    pub const ALL: [Technique; 14] = [
        Technique::Ola,
        Technique::Lca,
        Technique::Mla,
        Technique::Rank,
        Technique::Mcb,
        Technique::APriori,
        Technique::APosteriori,
        Technique::KnoraE,
        Technique::KnoraU,
        Technique::Knop,
        Technique::DesP,
        Technique::DesKl,
        Technique::DesKnn,
        Technique::DesClustering,
    ];

    /// Config-file identifier.
    pub fn key(&self) -> &'static str {
        match self {
            Technique::Ola => "ola",
            Technique::Lca => "lca",
            Technique::Mla => "mla",
            Technique::Rank => "rank",
            Technique::Mcb => "mcb",
            Technique::APriori => "apriori",
            Technique::APosteriori => "aposteriori",
            Technique::KnoraE => "knora-e",
            Technique::KnoraU => "knora-u",
            Technique::Knop => "knop",
            Technique::DesP => "des-p",
            Technique::DesKl => "des-kl",
            Technique::DesKnn => "des-knn",
            Technique::DesClustering => "des-clustering",
        }
    }

    /// Name used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            Technique::Ola => "OLA",
            Technique::Lca => "LCA",
            Technique::Mla => "MLA",
            Technique::Rank => "RANK",
            Technique::Mcb => "MCB",
            Technique::APriori => "A Priori",
            Technique::APosteriori => "A Posteriori",
            Technique::KnoraE => "KNORA-E",
            Technique::KnoraU => "KNORA-U",
            Technique::Knop => "KNOP",
            Technique::DesP => "DES-P",
            Technique::DesKl => "DES-KL",
            Technique::DesKnn => "DES-KNN",
            Technique::DesClustering => "DES-Clustering",
        }
    }

    /// Selects a single classifier rather than an ensemble.
    pub fn is_dcs(&self) -> bool {
        matches!(
            self,
            Technique::Ola
                | Technique::Lca
                | Technique::Mla
                | Technique::Rank
                | Technique::Mcb
                | Technique::APriori
                | Technique::APosteriori
        )
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        let norm = match norm.as_str() {
            "a-priori" => "apriori",
            "a-posteriori" => "aposteriori",
            "dcs-rank" => "rank",
            "des-kmeans" => "des-clustering",
            other => other,
        }
        .to_string();
        Technique::ALL
            .into_iter()
            .find(|t| t.key() == norm)
            .ok_or_else(|| Error::Unknown {
                what: "technique",
                name: s.to_string(),
            })
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Hyperparameters shared by the selection rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuleParams {
    /// Region-of-competence size.
    pub k: usize,
    /// Minimum output-profile similarity for MCB.
    pub mcb_threshold: f64,
    /// Required lead of the best A Priori / A Posteriori classifier over the
    /// runner-up; when it is not met, every classifier within the margin of
    /// the best votes.
    pub selection_margin: f64,
    /// Fraction of the pool kept by accuracy in DES-KNN / DES-Clustering.
    pub n_frac: f64,
    /// Fraction of the pool kept by diversity in DES-KNN / DES-Clustering.
    pub j_frac: f64,
    /// Cluster count for DES-Clustering.
    pub clusters: usize,
}

impl Default for RuleParams {
    fn default() -> Self {
        RuleParams {
            k: 7,
            mcb_threshold: 0.7,
            selection_margin: 0.0,
            n_frac: 0.5,
            j_frac: 0.3,
            clusters: 5,
        }
    }
}

impl RuleParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mcb_threshold) {
            return Err(Error::Config("mcb_threshold must lie in [0, 1]".into()));
        }
        if self.selection_margin.is_nan() || self.selection_margin < 0.0 {
            return Err(Error::Config(
                "selection_margin must be non-negative".into(),
            ));
        }
        for (name, v) in [("n_frac", self.n_frac), ("j_frac", self.j_frac)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        if self.j_frac > self.n_frac {
            return Err(Error::Config(format!(
                "j_frac ({}) must not exceed n_frac ({})",
                self.j_frac, self.n_frac
            )));
        }
        if self.clusters == 0 {
            return Err(Error::Config("clusters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetenceVector {
    pub rule: Technique,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    /// Pool indices of the selected classifier(s), ascending.
    pub selected: Vec<usize>,
    pub predicted_label: usize,
    pub competence: CompetenceVector,
    pub fallback_used: bool,
}

/// Per-query state shared by every rule.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedQuery {
    pub features: Vec<f64>,
    pub region: RegionOfCompetence,
    /// Every pool member's prediction for the query (its output profile).
    pub predictions: Vec<usize>,
}

/// A pool, its DSEL and everything precomputed from them.
#[derive(Debug, Clone)]
pub struct DynamicSelector {
    pool: ClassifierPool,
    dsel: Dataset,
    oracle: OracleMatrix,
    params: RuleParams,
    clusters: ClusterEnsembles,
}

impl DynamicSelector {
    pub fn new(pool: ClassifierPool, dsel: Dataset, params: RuleParams) -> Result<Self> {
        params.validate()?;
        if params.k > dsel.len() {
            return Err(Error::NeighborhoodTooLarge {
                k: params.k,
                available: dsel.len(),
            });
        }
        let oracle = build_oracle_matrix(&pool, &dsel)?;
        let cluster_seed = seed::derive(pool.seed, seed::stream_of("des-clustering"));
        let clusters = ClusterEnsembles::fit(
            &dsel,
            &oracle,
            params.clusters.min(dsel.len()),
            cluster_seed,
            params.n_frac,
            params.j_frac,
        )?;
        Ok(DynamicSelector {
            pool,
            dsel,
            oracle,
            params,
            clusters,
        })
    }

    pub fn pool(&self) -> &ClassifierPool {
        &self.pool
    }

    pub fn dsel(&self) -> &Dataset {
        &self.dsel
    }

    pub fn oracle(&self) -> &OracleMatrix {
        &self.oracle
    }

    pub fn params(&self) -> &RuleParams {
        &self.params
    }

    pub fn clusters(&self) -> &ClusterEnsembles {
        &self.clusters
    }

    pub fn prepare(&self, query: &[f64]) -> Result<PreparedQuery> {
        Ok(PreparedQuery {
            features: query.to_vec(),
            region: knn_region(query, &self.dsel, self.params.k)?,
            predictions: self.pool.predict_all(query),
        })
    }

    pub fn classify_prepared(
        &self,
        technique: Technique,
        q: &PreparedQuery,
    ) -> Result<SelectionOutcome> {
        let (region, oracle, preds) = (&q.region, &self.oracle, q.predictions.as_slice());
        let m = self.dsel.class_count();
        let p = &self.params;
        Ok(match technique {
            Technique::Ola => dcs::ola_classify(region, oracle, preds),
            Technique::Lca => dcs::lca_classify(region, oracle, preds),
            Technique::Mla => dcs::mla_classify(region, oracle, preds),
            Technique::Rank => dcs::rank_classify(region, oracle, preds),
            Technique::Mcb => dcs::mcb_classify(region, oracle, preds, p.mcb_threshold),
            Technique::APriori => {
                dcs::apriori_classify(region, oracle, preds, p.selection_margin, m)?
            }
            Technique::APosteriori => {
                dcs::aposteriori_classify(region, oracle, preds, p.selection_margin, m)?
            }
            Technique::KnoraE => des::knora_e_classify(region, oracle, preds, m)?,
            Technique::KnoraU => des::knora_u_classify(region, oracle, preds, m)?,
            Technique::Knop => des::knop_classify(oracle, preds, p.k, m)?,
            Technique::DesP => des::des_p_classify(region, oracle, preds, m)?,
            Technique::DesKl => des::des_kl_classify(region, oracle, preds, m)?,
            Technique::DesKnn => {
                des::des_knn_classify(region, oracle, preds, p.n_frac, p.j_frac, m)?
            }
            Technique::DesClustering => self.clusters.classify(&q.features, preds, m)?,
        })
    }

    pub fn classify(&self, technique: Technique, query: &[f64]) -> Result<SelectionOutcome> {
        let q = self.prepare(query)?;
        self.classify_prepared(technique, &q)
    }

    pub fn predict(&self, technique: Technique, query: &[f64]) -> Result<usize> {
        Ok(self.classify(technique, query)?.predicted_label)
    }
}
