//! Dynamic classifier selection: score every pool member on the region of
//! competence and let the single best one classify the query.
//!
//! All rules pick the highest competence with ties going to the lowest pool
//! index. Where a distance weight is needed it is `1 / (1 + d)`.

use crate::des::majority_vote;
use crate::error::Result;
use crate::pool::{argmax, OracleMatrix};
use crate::region::{profile_similarity, RegionOfCompetence};
use crate::selector::{CompetenceVector, SelectionOutcome, Technique};

pub fn distance_weight(d: f64) -> f64 {
    1.0 / (1.0 + d)
}

fn single(rule: Technique, values: Vec<f64>, predictions: &[usize]) -> SelectionOutcome {
    let best = argmax(&values);
    SelectionOutcome {
        selected: vec![best],
        predicted_label: predictions[best],
        competence: CompetenceVector { rule, values },
        fallback_used: false,
    }
}

/// Fraction of the region each classifier labels correctly.
pub fn ola_competence(region: &RegionOfCompetence, oracle: &OracleMatrix) -> Vec<f64> {
    let k = region.len() as f64;
    (0..oracle.pool_size())
        .map(|i| region.correct_count(oracle, i) as f64 / k)
        .collect()
}

pub fn ola_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
) -> SelectionOutcome {
    single(Technique::Ola, ola_competence(region, oracle), predictions)
}

/// Weighted accuracy of each classifier on the neighbours whose true label
/// equals the classifier's prediction for the query.
fn class_accuracy(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    weight: impl Fn(f64) -> f64,
) -> Vec<f64> {
    (0..oracle.pool_size())
        .map(|i| {
            let omega = predictions[i];
            let (mut num, mut den) = (0.0, 0.0);
            for (pos, &k) in region.indices.iter().enumerate() {
                if region.labels[pos] != omega {
                    continue;
                }
                let w = weight(region.distances[pos]);
                den += w;
                if oracle.is_correct(i, k) {
                    num += w;
                }
            }
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .collect()
}

pub fn lca_competence(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
) -> Vec<f64> {
    class_accuracy(region, oracle, predictions, |_| 1.0)
}

pub fn lca_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
) -> SelectionOutcome {
    single(
        Technique::Lca,
        lca_competence(region, oracle, predictions),
        predictions,
    )
}

pub fn mla_competence(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
) -> Vec<f64> {
    class_accuracy(region, oracle, predictions, distance_weight)
}

pub fn mla_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
) -> SelectionOutcome {
    single(
        Technique::Mla,
        mla_competence(region, oracle, predictions),
        predictions,
    )
}

/// Length of the run of correct answers starting at the nearest neighbour.
pub fn rank_competence(region: &RegionOfCompetence, oracle: &OracleMatrix) -> Vec<f64> {
    (0..oracle.pool_size())
        .map(|i| region.correctness(oracle, i).take_while(|&c| c).count() as f64)
        .collect()
}

pub fn rank_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
) -> SelectionOutcome {
    single(
        Technique::Rank,
        rank_competence(region, oracle),
        predictions,
    )
}

/// OLA restricted to neighbours whose output profile is at least
/// `threshold`-similar to the query's; the whole region is used when none is.
pub fn mcb_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    threshold: f64,
) -> SelectionOutcome {
    let kept: Vec<usize> = (0..region.len())
        .filter(|&pos| {
            let profile = oracle.profile(region.indices[pos]);
            profile_similarity(predictions, &profile).expect("profile length equals pool size")
                >= threshold
        })
        .collect();
    let fallback = kept.is_empty();
    let filtered = if fallback {
        region.clone()
    } else {
        RegionOfCompetence {
            indices: kept.iter().map(|&p| region.indices[p]).collect(),
            distances: kept.iter().map(|&p| region.distances[p]).collect(),
            labels: kept.iter().map(|&p| region.labels[p]).collect(),
        }
    };
    let mut out = single(
        Technique::Mcb,
        ola_competence(&filtered, oracle),
        predictions,
    );
    out.fallback_used = fallback;
    out
}

/// Picks the best classifier, or lets every classifier within `margin` of
/// the best vote when the best does not lead the runner-up by `margin`.
fn single_with_margin(
    rule: Technique,
    values: Vec<f64>,
    predictions: &[usize],
    margin: f64,
    class_count: usize,
) -> Result<SelectionOutcome> {
    let best = argmax(&values);
    if margin <= 0.0 || values.len() < 2 {
        return Ok(single(rule, values, predictions));
    }
    let runner_up = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    if values[best] - runner_up >= margin {
        return Ok(single(rule, values, predictions));
    }
    let selected: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] >= values[best] - margin)
        .collect();
    let votes: Vec<usize> = selected.iter().map(|&i| predictions[i]).collect();
    let tally = majority_vote(&votes, None, class_count)?;
    Ok(SelectionOutcome {
        selected,
        predicted_label: tally.winner,
        competence: CompetenceVector { rule, values },
        fallback_used: false,
    })
}

/// Distance-weighted mean probability each classifier assigns to the true
/// label of every neighbour.
pub fn apriori_competence(region: &RegionOfCompetence, oracle: &OracleMatrix) -> Vec<f64> {
    let weights: Vec<f64> = region
        .distances
        .iter()
        .map(|&d| distance_weight(d))
        .collect();
    let total: f64 = weights.iter().sum();
    (0..oracle.pool_size())
        .map(|i| {
            region
                .indices
                .iter()
                .zip(&region.labels)
                .zip(&weights)
                .map(|((&k, &label), w)| oracle.proba(i, k)[label] * w)
                .sum::<f64>()
                / total
        })
        .collect()
}

pub fn apriori_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    margin: f64,
    class_count: usize,
) -> Result<SelectionOutcome> {
    single_with_margin(
        Technique::APriori,
        apriori_competence(region, oracle),
        predictions,
        margin,
        class_count,
    )
}

/// Share of the probability mass each classifier puts on its query
/// prediction `ω` that falls on neighbours actually labelled `ω`.
pub fn aposteriori_competence(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
) -> Vec<f64> {
    (0..oracle.pool_size())
        .map(|i| {
            let omega = predictions[i];
            let (mut num, mut den) = (0.0, 0.0);
            for (pos, &k) in region.indices.iter().enumerate() {
                let mass = oracle.proba(i, k)[omega] * distance_weight(region.distances[pos]);
                den += mass;
                if region.labels[pos] == omega {
                    num += mass;
                }
            }
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .collect()
}

pub fn aposteriori_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    margin: f64,
    class_count: usize,
) -> Result<SelectionOutcome> {
    single_with_margin(
        Technique::APosteriori,
        aposteriori_competence(region, oracle, predictions),
        predictions,
        margin,
        class_count,
    )
}
