//! Dynamic ensemble selection: pick a subset of the pool per query and
//! combine it by (weighted) majority vote.
//!
//! Every rule has a guaranteed answer. When no classifier meets a rule's
//! criterion the whole pool votes unweighted and `fallback_used` is set.

use crate::data::Dataset;
use crate::dcs::{distance_weight, ola_competence};
use crate::error::{Error, Result};
use crate::pool::OracleMatrix;
use crate::region::{kmeans_fit, profile_region, ClusterModel, RegionOfCompetence};
use crate::selector::{CompetenceVector, SelectionOutcome, Technique};

/// Soft outputs are clamped to `[KL_EPSILON, 1 - KL_EPSILON]` before the
/// divergence is taken.
pub const KL_EPSILON: f64 = 1e-6;

/// DES-KL competences within this distance of zero count as zero, so
/// exactly cancelling neighbours do not select on rounding noise.
pub const KL_ZERO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct VoteTally {
    pub counts: Vec<f64>,
    pub winner: usize,
}

/// Sums (optionally weighted) votes per class; ties go to the lowest class.
pub fn majority_vote(
    predictions: &[usize],
    weights: Option<&[f64]>,
    class_count: usize,
) -> Result<VoteTally> {
    if predictions.is_empty() {
        return Err(Error::Empty("no votes to count".into()));
    }
    if let Some(w) = weights {
        if w.len() != predictions.len() {
            return Err(Error::Dimension {
                expected: predictions.len(),
                got: w.len(),
            });
        }
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config(
                "vote weights must be finite and non-negative".into(),
            ));
        }
    }
    let mut counts = vec![0.0; class_count];
    for (j, &p) in predictions.iter().enumerate() {
        if p >= class_count {
            return Err(Error::InvalidDataset(format!(
                "vote for class {p} of {class_count}"
            )));
        }
        counts[p] += weights.map_or(1.0, |w| w[j]);
    }
    let winner = crate::pool::argmax(&counts);
    Ok(VoteTally { counts, winner })
}

fn vote(
    rule: Technique,
    selected: Vec<usize>,
    weights: Option<Vec<f64>>,
    predictions: &[usize],
    class_count: usize,
    values: Vec<f64>,
) -> Result<SelectionOutcome> {
    let votes: Vec<usize> = selected.iter().map(|&i| predictions[i]).collect();
    let tally = majority_vote(&votes, weights.as_deref(), class_count)?;
    Ok(SelectionOutcome {
        selected,
        predicted_label: tally.winner,
        competence: CompetenceVector { rule, values },
        fallback_used: false,
    })
}

fn full_pool(
    rule: Technique,
    predictions: &[usize],
    class_count: usize,
    values: Vec<f64>,
) -> Result<SelectionOutcome> {
    let all = (0..predictions.len()).collect();
    let mut out = vote(rule, all, None, predictions, class_count, values)?;
    out.fallback_used = true;
    Ok(out)
}

/// KNORA-Eliminate: keep the classifiers that are right on every neighbour,
/// dropping the farthest neighbour until at least one qualifies.
pub fn knora_e_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    class_count: usize,
) -> Result<SelectionOutcome> {
    let prefix: Vec<f64> = (0..oracle.pool_size())
        .map(|i| region.correctness(oracle, i).take_while(|&c| c).count() as f64)
        .collect();
    for size in (1..=region.len()).rev() {
        let current = region.truncated(size);
        let selected: Vec<usize> = (0..oracle.pool_size())
            .filter(|&i| current.correctness(oracle, i).all(|c| c))
            .collect();
        if !selected.is_empty() {
            return vote(
                Technique::KnoraE,
                selected,
                None,
                predictions,
                class_count,
                prefix,
            );
        }
    }
    full_pool(Technique::KnoraE, predictions, class_count, prefix)
}

fn union_vote(
    rule: Technique,
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    class_count: usize,
) -> Result<SelectionOutcome> {
    let counts: Vec<f64> = (0..oracle.pool_size())
        .map(|i| region.correct_count(oracle, i) as f64)
        .collect();
    let selected: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] > 0.0).collect();
    if selected.is_empty() {
        return full_pool(rule, predictions, class_count, counts);
    }
    let weights = selected.iter().map(|&i| counts[i]).collect();
    vote(
        rule,
        selected,
        Some(weights),
        predictions,
        class_count,
        counts,
    )
}

/// KNORA-Union: each classifier votes once per neighbour it gets right.
pub fn knora_u_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    class_count: usize,
) -> Result<SelectionOutcome> {
    union_vote(Technique::KnoraU, region, oracle, predictions, class_count)
}

/// KNORA-U counting over the `k` DSEL samples whose output profiles are
/// closest to the query's.
pub fn knop_classify(
    oracle: &OracleMatrix,
    predictions: &[usize],
    k: usize,
    class_count: usize,
) -> Result<SelectionOutcome> {
    let region = profile_region(predictions, oracle, k)?;
    union_vote(Technique::Knop, &region, oracle, predictions, class_count)
}

/// DES-Performance: keep classifiers whose local accuracy beats random
/// guessing (`1 / M`).
pub fn des_p_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    class_count: usize,
) -> Result<SelectionOutcome> {
    let m = class_count as f64;
    let values: Vec<f64> = ola_competence(region, oracle)
        .into_iter()
        .map(|a| a - 1.0 / m)
        .collect();
    // integer comparison keeps the strict boundary exact
    let selected: Vec<usize> = (0..oracle.pool_size())
        .filter(|&i| region.correct_count(oracle, i) * class_count > region.len())
        .collect();
    if selected.is_empty() {
        return full_pool(Technique::DesP, predictions, class_count, values);
    }
    vote(
        Technique::DesP,
        selected,
        None,
        predictions,
        class_count,
        values,
    )
}

/// KL divergence of a clamped, renormalised distribution from uniform.
pub fn kl_to_uniform(p: &[f64]) -> f64 {
    let m = p.len() as f64;
    let clamped: Vec<f64> = p
        .iter()
        .map(|v| v.clamp(KL_EPSILON, 1.0 - KL_EPSILON))
        .collect();
    let total: f64 = clamped.iter().sum();
    clamped
        .iter()
        .map(|v| {
            let q = v / total;
            q * (q * m).ln()
        })
        .sum()
}

pub fn des_kl_competence(region: &RegionOfCompetence, oracle: &OracleMatrix) -> Vec<f64> {
    (0..oracle.pool_size())
        .map(|i| {
            region
                .indices
                .iter()
                .zip(&region.distances)
                .map(|(&k, &d)| {
                    let sign = if oracle.is_correct(i, k) { 1.0 } else { -1.0 };
                    sign * kl_to_uniform(oracle.proba(i, k)) * distance_weight(d)
                })
                .sum()
        })
        .collect()
}

/// DES-KL: per-neighbour source competence is the divergence of the soft
/// output from uniform, signed by correctness, summed with distance decay.
pub fn des_kl_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    class_count: usize,
) -> Result<SelectionOutcome> {
    let values = des_kl_competence(region, oracle);
    let selected: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] > KL_ZERO_TOLERANCE)
        .collect();
    if selected.is_empty() {
        return full_pool(Technique::DesKl, predictions, class_count, values);
    }
    vote(
        Technique::DesKl,
        selected,
        None,
        predictions,
        class_count,
        values,
    )
}

/// `ceil(frac * pool_size)`, at least one.
pub fn fraction_count(frac: f64, pool_size: usize) -> usize {
    (((frac * pool_size as f64) - 1e-9).ceil().max(1.0) as usize).min(pool_size)
}

/// Fraction of `samples` both classifiers get wrong.
pub fn double_fault(oracle: &OracleMatrix, a: usize, b: usize, samples: &[usize]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let both = samples
        .iter()
        .filter(|&&k| !oracle.is_correct(a, k) && !oracle.is_correct(b, k))
        .count();
    both as f64 / samples.len() as f64
}

/// Keeps the `N` most accurate classifiers on `samples`, then the `J` of
/// those with the lowest mean double-fault against the other `N - 1`.
///
/// Returns the selected indices (ascending) and every classifier's accuracy.
pub fn accuracy_diversity_select(
    samples: &[usize],
    oracle: &OracleMatrix,
    n_frac: f64,
    j_frac: f64,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let p = oracle.pool_size();
    let n_keep = fraction_count(n_frac, p);
    let j_keep = fraction_count(j_frac, p);
    if j_keep > n_keep {
        return Err(Error::Config(format!(
            "diversity subset J = {j_keep} exceeds accuracy subset N = {n_keep}"
        )));
    }
    let accuracy: Vec<f64> = (0..p)
        .map(|i| {
            if samples.is_empty() {
                return 0.0;
            }
            samples.iter().filter(|&&k| oracle.is_correct(i, k)).count() as f64
                / samples.len() as f64
        })
        .collect();
    let mut ranked: Vec<usize> = (0..p).collect();
    ranked.sort_by(|&a, &b| accuracy[b].total_cmp(&accuracy[a]).then(a.cmp(&b)));
    ranked.truncate(n_keep);

    // integer double-fault totals keep the diversity ordering exact
    let both_wrong: Vec<usize> = ranked
        .iter()
        .map(|&a| {
            ranked
                .iter()
                .filter(|&&b| b != a)
                .map(|&b| {
                    samples
                        .iter()
                        .filter(|&&k| !oracle.is_correct(a, k) && !oracle.is_correct(b, k))
                        .count()
                })
                .sum()
        })
        .collect();
    // stable sort keeps accuracy order among equally diverse members
    let mut order: Vec<usize> = (0..ranked.len()).collect();
    order.sort_by_key(|&x| both_wrong[x]);
    let mut selected: Vec<usize> = order[..j_keep].iter().map(|&x| ranked[x]).collect();
    selected.sort_unstable();
    Ok((selected, accuracy))
}

pub fn des_knn_classify(
    region: &RegionOfCompetence,
    oracle: &OracleMatrix,
    predictions: &[usize],
    n_frac: f64,
    j_frac: f64,
    class_count: usize,
) -> Result<SelectionOutcome> {
    let (selected, accuracy) = accuracy_diversity_select(&region.indices, oracle, n_frac, j_frac)?;
    vote(
        Technique::DesKnn,
        selected,
        None,
        predictions,
        class_count,
        accuracy,
    )
}

/// k-means partition of DSEL with one accuracy/diversity ensemble per cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterEnsembles {
    pub model: ClusterModel,
    pub ensembles: Vec<Vec<usize>>,
    pub accuracy: Vec<Vec<f64>>,
}

impl ClusterEnsembles {
    pub fn fit(
        dsel: &Dataset,
        oracle: &OracleMatrix,
        k: usize,
        seed: u64,
        n_frac: f64,
        j_frac: f64,
    ) -> Result<Self> {
        let model = kmeans_fit(dsel, k, seed)?;
        let everything: Vec<usize> = (0..dsel.len()).collect();
        let mut ensembles = Vec::with_capacity(k);
        let mut accuracy = Vec::with_capacity(k);
        for members in &model.members {
            let samples = if members.is_empty() {
                &everything
            } else {
                members
            };
            let (sel, acc) = accuracy_diversity_select(samples, oracle, n_frac, j_frac)?;
            ensembles.push(sel);
            accuracy.push(acc);
        }
        Ok(ClusterEnsembles {
            model,
            ensembles,
            accuracy,
        })
    }

    pub fn classify(
        &self,
        query: &[f64],
        predictions: &[usize],
        class_count: usize,
    ) -> Result<SelectionOutcome> {
        let c = self.model.nearest_cluster(query);
        vote(
            Technique::DesClustering,
            self.ensembles[c].clone(),
            None,
            predictions,
            class_count,
            self.accuracy[c].clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle_from(correct: &[&[u8]]) -> OracleMatrix {
        let n = correct[0].len();
        let preds = correct
            .iter()
            .map(|row| row.iter().map(|&c| if c == 1 { 0 } else { 1 }).collect())
            .collect();
        OracleMatrix::from_parts(vec![0; n], preds, None, 2).unwrap()
    }

    fn flat(k: usize) -> RegionOfCompetence {
        RegionOfCompetence {
            indices: (0..k).collect(),
            distances: vec![1.0; k],
            labels: vec![0; k],
        }
    }

    #[test]
    fn vote_examples() {
        assert_eq!(majority_vote(&[0, 0, 1], None, 2).unwrap().winner, 0);
        assert_eq!(
            majority_vote(&[0, 1], Some(&[1.0, 3.0]), 2).unwrap().winner,
            1
        );
        assert_eq!(
            majority_vote(&[0, 1], Some(&[2.0, 2.0]), 2).unwrap().winner,
            0
        );
        assert!(majority_vote(&[], None, 2).is_err());
        assert!(majority_vote(&[0], Some(&[1.0, 1.0]), 2).is_err());
    }

    #[test]
    fn knora_e_shrinks_until_someone_qualifies() {
        let o = oracle_from(&[&[1, 1, 0], &[1, 0, 0]]);
        let out = knora_e_classify(&flat(3), &o, &[1, 0], 2).unwrap();
        assert_eq!(out.selected, vec![0]);
        assert_eq!(out.predicted_label, 1);
        assert!(!out.fallback_used);
    }

    #[test]
    fn knora_e_singleton_and_fallback() {
        let o = oracle_from(&[&[1; 7], &[1, 1, 1, 1, 1, 1, 0]]);
        let out = knora_e_classify(&flat(7), &o, &[1, 0], 2).unwrap();
        assert_eq!((out.selected, out.predicted_label), (vec![0], 1));

        let wrong = oracle_from(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
        let out = knora_e_classify(&flat(3), &wrong, &[1, 0, 1], 2).unwrap();
        assert!(out.fallback_used);
        assert_eq!(out.selected, vec![0, 1, 2]);
        assert_eq!(out.predicted_label, 1);
    }

    #[test]
    fn knora_u_weighted_vote() {
        // counts 2, 3, 0 and predictions A, B, A
        let o = oracle_from(&[&[1, 1, 0], &[1, 1, 1], &[0, 0, 0]]);
        let out = knora_u_classify(&flat(3), &o, &[0, 1, 0], 2).unwrap();
        assert_eq!(out.competence.values, vec![2.0, 3.0, 0.0]);
        assert_eq!(out.selected, vec![0, 1]);
        assert_eq!(out.predicted_label, 1);

        let o = oracle_from(&[&[1; 7], &[1, 0, 0, 0, 0, 0, 0]]);
        assert_eq!(
            knora_u_classify(&flat(7), &o, &[1, 0], 2)
                .unwrap()
                .predicted_label,
            1
        );
    }

    #[test]
    fn knora_u_all_correct_is_plain_vote() {
        let o = oracle_from(&[&[1, 1], &[1, 1], &[1, 1]]);
        let preds = [1, 0, 1];
        let out = knora_u_classify(&flat(2), &o, &preds, 2).unwrap();
        assert_eq!(
            out.predicted_label,
            majority_vote(&preds, None, 2).unwrap().winner
        );
        assert!(!out.fallback_used);
        let none = oracle_from(&[&[0, 0], &[0, 0]]);
        assert!(
            knora_u_classify(&flat(2), &none, &[1, 0], 2)
                .unwrap()
                .fallback_used
        );
    }

    #[test]
    fn knop_identical_profiles_use_first_k() {
        let o = OracleMatrix::from_parts(vec![0, 1, 1, 0], vec![vec![1; 4], vec![1; 4]], None, 2)
            .unwrap();
        let region = profile_region(&[1, 1], &o, 2).unwrap();
        assert_eq!(region.indices, vec![0, 1]);
        assert_eq!(region.distances, vec![0.0, 0.0]);
        let out = knop_classify(&o, &[1, 1], 2, 2).unwrap();
        assert_eq!(out.predicted_label, 1);
    }

    #[test]
    fn knop_region_follows_profile_cluster() {
        // samples 0-2 have profile [0, 0], samples 3-5 have [1, 1]
        let preds = vec![vec![0, 0, 0, 1, 1, 1], vec![0, 0, 0, 1, 1, 1]];
        let o = OracleMatrix::from_parts(vec![0, 0, 1, 1, 1, 0], preds, None, 2).unwrap();
        let r = profile_region(&[1, 1], &o, 3).unwrap();
        assert_eq!(r.indices, vec![3, 4, 5]);
        let r = profile_region(&[0, 0], &o, 3).unwrap();
        assert_eq!(r.indices, vec![0, 1, 2]);
    }

    #[test]
    fn des_p_threshold() {
        let o = oracle_from(&[
            &[1, 1, 1, 1, 1, 0, 0],
            &[1, 1, 1, 0, 0, 0, 0],
            &[1, 1, 1, 1, 1, 1, 0],
            &[1, 1, 0, 0, 0, 0, 0],
        ]);
        let out = des_p_classify(&flat(7), &o, &[0, 1, 0, 1], 2).unwrap();
        assert_eq!(out.selected, vec![0, 2]);
        assert!((out.competence.values[0] - (5.0 / 7.0 - 0.5)).abs() < 1e-12);

        let four = oracle_from(&[&[1, 1, 1, 1, 0, 0, 0]]);
        let out = des_p_classify(&flat(7), &four, &[1], 2).unwrap();
        assert!((out.competence.values[0] - 1.0 / 14.0).abs() < 1e-12);
        assert_eq!(out.selected, vec![0]);

        let half = oracle_from(&[&[1, 1, 0, 0], &[0, 1, 0, 1]]);
        let out = des_p_classify(&flat(4), &half, &[1, 0], 2).unwrap();
        assert!(out.fallback_used);
        assert_eq!(out.selected, vec![0, 1]);
    }

    #[test]
    fn des_p_many_classes_keeps_any_hit() {
        let m = 100;
        let labels: Vec<usize> = (0..m).collect();
        let region = RegionOfCompetence {
            indices: (0..7).collect(),
            distances: vec![1.0; 7],
            labels: labels[..7].to_vec(),
        };
        // classifier 0 right on sample 0 only, classifier 1 never right
        let mut p0 = labels.clone();
        for v in p0.iter_mut().skip(1) {
            *v = 0;
        }
        let p1 = vec![99; m];
        let o = OracleMatrix::from_parts(labels, vec![p0, p1], None, m).unwrap();
        let out = des_p_classify(&region, &o, &[3, 4], m).unwrap();
        assert_eq!(out.selected, vec![0]);
    }

    #[test]
    fn kl_closed_forms() {
        assert!(kl_to_uniform(&[0.5, 0.5]).abs() < 1e-15);
        let e = KL_EPSILON;
        let two = (1.0 - e) * (2.0 * (1.0 - e)).ln() + e * (2.0 * e).ln();
        assert!((kl_to_uniform(&[1.0, 0.0]) - two).abs() < 1e-12);
        let s = 1.0 + e;
        let (a, b) = ((1.0 - e) / s, e / s);
        let three = a * (3.0 * a).ln() + 2.0 * b * (3.0 * b).ln();
        assert!((kl_to_uniform(&[1.0, 0.0, 0.0]) - three).abs() < 1e-12);
        assert!((kl_to_uniform(&[0.0, 1.0, 0.0]) - 3f64.ln()).abs() < 1e-4);
    }

    #[test]
    fn des_kl_signs_and_fallback() {
        let region = RegionOfCompetence {
            indices: vec![0, 1],
            distances: vec![0.0, 1.0],
            labels: vec![0, 1],
        };
        let soft = vec![
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        ];
        let o = OracleMatrix::from_parts(
            vec![0, 1],
            vec![vec![0, 1], vec![1, 0], vec![0, 0]],
            Some(soft),
            2,
        )
        .unwrap();
        let v = des_kl_competence(&region, &o);
        let kl = kl_to_uniform(&[1.0, 0.0]);
        assert!((v[0] - kl * 1.5).abs() < 1e-12);
        assert!((v[0] - 2f64.ln() * 1.5).abs() < 1e-4);
        assert!((v[1] + kl * 1.5).abs() < 1e-12);
        assert_eq!(v[2], 0.0);
        let out = des_kl_classify(&region, &o, &[1, 0, 0], 2).unwrap();
        assert_eq!(out.selected, vec![0]);

        let uniform = OracleMatrix::from_parts(
            vec![0, 1],
            vec![vec![0, 0]],
            Some(vec![vec![vec![0.5, 0.5]; 2]]),
            2,
        )
        .unwrap();
        assert!(
            des_kl_classify(&region, &uniform, &[1], 2)
                .unwrap()
                .fallback_used
        );
    }

    #[test]
    fn des_knn_prefers_the_distinct_classifier() {
        // c0 and c1 identical, c2 as accurate but wrong elsewhere
        let o = oracle_from(&[
            &[1, 1, 1, 0, 0, 1],
            &[1, 1, 1, 0, 0, 1],
            &[1, 1, 1, 1, 0, 0],
        ]);
        let (sel, acc) =
            accuracy_diversity_select(&(0..6).collect::<Vec<_>>(), &o, 1.0, 0.6).unwrap();
        assert_eq!(acc, vec![4.0 / 6.0; 3]);
        // mean double fault: c0 (2/6 + 1/6) / 2, c1 same, c2 (1/6 + 1/6) / 2
        assert_eq!(sel, vec![0, 2]);
    }

    #[test]
    fn des_knn_degenerate_and_errors() {
        let o = oracle_from(&[&[1, 0], &[0, 1]]);
        let out = des_knn_classify(&flat(2), &o, &[1, 0], 1.0, 1.0, 2).unwrap();
        assert_eq!(out.selected, vec![0, 1]);
        assert_eq!(
            out.predicted_label,
            majority_vote(&[1, 0], None, 2).unwrap().winner
        );
        assert!(des_knn_classify(&flat(2), &o, &[1, 0], 0.5, 1.0, 2).is_err());

        // accuracy tie between c1 and c2 resolved by index when N = 1
        let o = oracle_from(&[&[0, 0], &[1, 1], &[1, 1]]);
        let (sel, _) = accuracy_diversity_select(&[0, 1], &o, 0.3, 0.3).unwrap();
        assert_eq!(sel, vec![1]);
    }

    #[test]
    fn fraction_counts() {
        assert_eq!(fraction_count(0.5, 100), 50);
        assert_eq!(fraction_count(0.3, 100), 30);
        assert_eq!(fraction_count(0.3, 25), 8);
        assert_eq!(fraction_count(0.01, 25), 1);
        assert_eq!(fraction_count(1.0, 7), 7);
    }

    fn blobs() -> (Dataset, OracleMatrix) {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..6 {
            let jitter = i as f64 * 0.1;
            rows.push(vec![-5.0 + jitter, jitter]);
            labels.push(i % 2);
            rows.push(vec![5.0 + jitter, -jitter]);
            labels.push(i % 2);
        }
        let dsel = Dataset::new("blobs", rows, labels.clone(), 2).unwrap();
        // c0 is right on the left blob only, c1 on the right blob only, c2 never
        let left = |s: usize| s.is_multiple_of(2);
        let flip = |l: usize| 1 - l;
        let c0 = (0..12)
            .map(|s| if left(s) { labels[s] } else { flip(labels[s]) })
            .collect();
        let c1 = (0..12)
            .map(|s| if left(s) { flip(labels[s]) } else { labels[s] })
            .collect();
        let c2 = labels.iter().map(|&l| flip(l)).collect();
        let o = OracleMatrix::from_parts(labels, vec![c0, c1, c2], None, 2).unwrap();
        (dsel, o)
    }

    #[test]
    fn clustering_switches_ensemble_with_the_blob() {
        let (dsel, o) = blobs();
        let model = ClusterEnsembles::fit(&dsel, &o, 2, 1, 0.2, 0.2).unwrap();
        let preds = [0, 1, 1];
        let left = model.classify(&[-5.0, 0.0], &preds, 2).unwrap();
        let right = model.classify(&[5.0, 0.0], &preds, 2).unwrap();
        assert_eq!((left.selected, left.predicted_label), (vec![0], 0));
        assert_eq!((right.selected, right.predicted_label), (vec![1], 1));
    }

    #[test]
    fn one_cluster_is_global_selection() {
        let (dsel, o) = blobs();
        let model = ClusterEnsembles::fit(&dsel, &o, 1, 1, 0.7, 0.4).unwrap();
        let all: Vec<usize> = (0..dsel.len()).collect();
        let (global, _) = accuracy_diversity_select(&all, &o, 0.7, 0.4).unwrap();
        assert_eq!(model.ensembles[0], global);
        let centroid = model.model.centroids[0].clone();
        assert_eq!(
            model.classify(&centroid, &[0, 1, 1], 2).unwrap().selected,
            global
        );
    }
}
