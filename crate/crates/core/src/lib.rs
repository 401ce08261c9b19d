//! Dynamic classifier and ensemble selection.
//!
//! A pool of bagged perceptrons is trained once; for every query, a region of
//! competence (its nearest neighbours in a held-out selection set) is used to
//! estimate how competent each pool member is locally, and either the single
//! best member (DCS) or a subset of members (DES) classifies the query.
//!
//! The crate also provides the kDN instance-hardness measure, a hybrid
//! classifier that routes easy queries to K-NN and hard ones to a selection
//! rule, rank-based statistics for comparing techniques across datasets, and
//! an experiment harness that ties it all together.

pub mod data;
pub mod dcs;
pub mod des;
pub mod error;
pub mod evaluation;
pub mod hardness;
pub mod harness;
pub mod pool;
pub mod region;
pub mod seed;
pub mod selector;

pub use data::{Dataset, SplitSpec};
pub use error::{Error, Result};
pub use pool::{ClassifierPool, LinearClassifier, OracleMatrix, PerceptronParams};
pub use region::RegionOfCompetence;
pub use selector::{DynamicSelector, RuleParams, SelectionOutcome, Technique};
