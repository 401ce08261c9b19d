//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use dynsel::data::{
    apply_standardizer, fit_standardizer, generate_synthetic, stratified_split, Dataset,
    SyntheticKind,
};
use dynsel::des::{self, ClusterEnsembles};
use dynsel::evaluation::{friedman_ranks, ranks_for_row, sign_test_critical, Alpha, ResultsTable};
use dynsel::hardness::{kdn, kdn_count, kdn_of_member, HybridClassifier, Route};
use dynsel::harness::{ExperimentConfig, ExperimentReport};
use dynsel::pool::{bagging_generate, OracleMatrix, PerceptronParams};
use dynsel::region::{KnnClassifier, RegionOfCompetence};
use dynsel::seed;
use dynsel::selector::{DynamicSelector, RuleParams, SelectionOutcome, Technique};
use dynsel::{dcs, Result};

struct Line {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

// ---------------------------------------------------------------------------
// Criterion 1: brute-force evaluators for every rule on micro-instances.

struct Micro {
    m: usize,
    labels: Vec<usize>,
    /// `preds[i][k]`: classifier i on DSEL sample k.
    preds: Vec<Vec<usize>>,
    soft: Vec<Vec<Vec<f64>>>,
    query: Vec<usize>,
    idx: Vec<usize>,
    dist: Vec<f64>,
}

impl Micro {
    fn p(&self) -> usize {
        self.preds.len()
    }

    fn correct(&self, i: usize, k: usize) -> bool {
        self.preds[i][k] == self.labels[k]
    }

    fn region(&self) -> RegionOfCompetence {
        RegionOfCompetence {
            indices: self.idx.clone(),
            distances: self.dist.clone(),
            labels: self.idx.iter().map(|&k| self.labels[k]).collect(),
        }
    }

    fn oracle(&self) -> OracleMatrix {
        OracleMatrix::from_parts(
            self.labels.clone(),
            self.preds.clone(),
            Some(self.soft.clone()),
            self.m,
        )
        .unwrap()
    }
}

fn micro(rng: &mut seed::Rng) -> Micro {
    let p = rng.random_range(1..=4);
    let k = rng.random_range(1..=4);
    let m = rng.random_range(2..=3);
    let n = rng.random_range(k.max(m)..=6);
    let labels = loop {
        let l: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
        if (0..m).all(|c| l.contains(&c)) {
            break l;
        }
    };
    let preds: Vec<Vec<usize>> = (0..p)
        .map(|_| (0..n).map(|_| rng.random_range(0..m)).collect())
        .collect();
    let one_hot = rng.random_bool(0.25);
    let soft = preds
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| {
                    if one_hot {
                        return (0..m).map(|j| if j == c { 1.0 } else { 0.0 }).collect();
                    }
                    let mut v: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
                    let top = (0..m).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
                    v.swap(top, c);
                    v[c] += 0.01;
                    let s: f64 = v.iter().sum();
                    v.iter().map(|x| x / s).collect()
                })
                .collect()
        })
        .collect();
    let query = (0..p).map(|_| rng.random_range(0..m)).collect();
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let idx = all[..k].to_vec();
    let mut dist: Vec<f64> = (0..k)
        .map(|_| rng.random_range(0..6) as f64 * 0.5)
        .collect();
    dist.sort_by(f64::total_cmp);
    Micro {
        m,
        labels,
        preds,
        soft,
        query,
        idx,
        dist,
    }
}

fn first_max(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

fn tally(votes: &[(usize, f64)], m: usize) -> usize {
    let mut counts = vec![0.0; m];
    for &(c, w) in votes {
        counts[c] += w;
    }
    first_max(&counts)
}

struct Expected {
    selected: Vec<usize>,
    label: usize,
    fallback: bool,
    values: Vec<f64>,
}

fn pick_one(values: Vec<f64>, query: &[usize]) -> Expected {
    let b = first_max(&values);
    Expected {
        selected: vec![b],
        label: query[b],
        fallback: false,
        values,
    }
}

fn ensemble(sel: Vec<usize>, weights: Option<&[f64]>, x: &Micro, values: Vec<f64>) -> Expected {
    if sel.is_empty() {
        let all: Vec<usize> = (0..x.p()).collect();
        let votes: Vec<_> = all.iter().map(|&i| (x.query[i], 1.0)).collect();
        return Expected {
            label: tally(&votes, x.m),
            selected: all,
            fallback: true,
            values,
        };
    }
    let votes: Vec<_> = sel
        .iter()
        .map(|&i| (x.query[i], weights.map_or(1.0, |w| w[i])))
        .collect();
    Expected {
        label: tally(&votes, x.m),
        selected: sel,
        fallback: false,
        values,
    }
}

fn w(d: f64) -> f64 {
    1.0 / (1.0 + d)
}

fn bf_ola(x: &Micro, positions: &[usize]) -> Vec<f64> {
    (0..x.p())
        .map(|i| {
            positions
                .iter()
                .filter(|&&j| x.correct(i, x.idx[j]))
                .count() as f64
                / positions.len() as f64
        })
        .collect()
}

fn bf_class_acc(x: &Micro, weighted: bool) -> Vec<f64> {
    (0..x.p())
        .map(|i| {
            let same: Vec<usize> = (0..x.idx.len())
                .filter(|&j| x.labels[x.idx[j]] == x.query[i])
                .collect();
            let wt = |j: usize| if weighted { w(x.dist[j]) } else { 1.0 };
            let den: f64 = same.iter().map(|&j| wt(j)).sum();
            let num: f64 = same
                .iter()
                .filter(|&&j| x.correct(i, x.idx[j]))
                .map(|&j| wt(j))
                .sum();
            if den == 0.0 {
                0.0
            } else {
                num / den
            }
        })
        .collect()
}

fn bf_prefix(x: &Micro, i: usize) -> usize {
    let mut n = 0;
    for &k in &x.idx {
        if !x.correct(i, k) {
            break;
        }
        n += 1;
    }
    n
}

fn with_margin(values: Vec<f64>, x: &Micro, margin: f64) -> Expected {
    let b = first_max(&values);
    let runner = (0..values.len())
        .filter(|&i| i != b)
        .map(|i| values[i])
        .fold(f64::NEG_INFINITY, f64::max);
    if margin <= 0.0 || values.len() == 1 || values[b] - runner >= margin {
        return pick_one(values, &x.query);
    }
    let sel: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] >= values[b] - margin)
        .collect();
    let mut e = ensemble(sel, None, x, values);
    e.fallback = false;
    e
}

fn kl_uniform(p: &[f64]) -> f64 {
    let eps = 1e-6;
    let c: Vec<f64> = p.iter().map(|&v| v.max(eps).min(1.0 - eps)).collect();
    let s: f64 = c.iter().sum();
    let m = p.len() as f64;
    c.iter().map(|v| v / s).map(|q| q * q.ln()).sum::<f64>() + m.ln()
}

fn ceil_frac(f: f64, p: usize) -> usize {
    let raw = f * p as f64;
    let r = raw.round();
    let c = if (raw - r).abs() < 1e-9 {
        r
    } else {
        raw.ceil()
    };
    (c as usize).clamp(1, p)
}

/// Accuracy/diversity ensemble over `samples`, computed from counts.
fn bf_acc_div(x: &Micro, samples: &[usize], nf: f64, jf: f64) -> (Vec<usize>, Vec<f64>) {
    let p = x.p();
    let hits: Vec<usize> = (0..p)
        .map(|i| samples.iter().filter(|&&k| x.correct(i, k)).count())
        .collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(hits[i]), i));
    let top = &order[..ceil_frac(nf, p)];
    let mut by_div: Vec<(usize, usize, usize)> = top
        .iter()
        .enumerate()
        .map(|(rank, &a)| {
            let df: usize = top
                .iter()
                .filter(|&&b| b != a)
                .map(|&b| {
                    samples
                        .iter()
                        .filter(|&&k| !x.correct(a, k) && !x.correct(b, k))
                        .count()
                })
                .sum();
            (df, rank, a)
        })
        .collect();
    by_div.sort();
    let mut sel: Vec<usize> = by_div[..ceil_frac(jf, p)].iter().map(|t| t.2).collect();
    sel.sort();
    let acc = hits
        .iter()
        .map(|&h| {
            if samples.is_empty() {
                0.0
            } else {
                h as f64 / samples.len() as f64
            }
        })
        .collect();
    (sel, acc)
}

fn knora_u_on(x: &Micro, positions_idx: &[usize]) -> Expected {
    let counts: Vec<f64> = (0..x.p())
        .map(|i| positions_idx.iter().filter(|&&k| x.correct(i, k)).count() as f64)
        .collect();
    let sel: Vec<usize> = (0..x.p()).filter(|&i| counts[i] > 0.0).collect();
    let c = counts.clone();
    ensemble(sel, Some(&c), x, counts)
}

fn matches(got: &SelectionOutcome, exp: &Expected) -> bool {
    let mut sel = got.selected.clone();
    sel.sort();
    sel == exp.selected
        && got.predicted_label == exp.label
        && got.fallback_used == exp.fallback
        && got.competence.values.len() == exp.values.len()
        && got
            .competence
            .values
            .iter()
            .zip(&exp.values)
            .all(|(a, b)| (a - b).abs() <= 1e-9)
}

fn criterion_rules() -> Line {
    let start = Instant::now();
    let mut rng = seed::rng(0xACCE97);
    let mut mismatches: Vec<String> = Vec::new();
    let mut checks = 0;
    for case in 0..200 {
        let x = micro(&mut rng);
        let region = x.region();
        let oracle = x.oracle();
        let q = &x.query;
        let all_pos: Vec<usize> = (0..x.idx.len()).collect();
        let mut record = |rule: &str, got: Result<SelectionOutcome>, exp: Expected| {
            checks += 1;
            match got {
                Ok(g) if matches(&g, &exp) => {}
                other => mismatches.push(format!(
                    "case {case} {rule}: got {:?}, expected {:?} -> {} fallback {} values {:?}",
                    other.map(|g| (
                        g.selected,
                        g.predicted_label,
                        g.fallback_used,
                        g.competence.values
                    )),
                    exp.selected,
                    exp.label,
                    exp.fallback,
                    exp.values
                )),
            }
        };

        record(
            "ola",
            Ok(dcs::ola_classify(&region, &oracle, q)),
            pick_one(bf_ola(&x, &all_pos), q),
        );
        record(
            "lca",
            Ok(dcs::lca_classify(&region, &oracle, q)),
            pick_one(bf_class_acc(&x, false), q),
        );
        record(
            "mla",
            Ok(dcs::mla_classify(&region, &oracle, q)),
            pick_one(bf_class_acc(&x, true), q),
        );
        let prefixes: Vec<f64> = (0..x.p()).map(|i| bf_prefix(&x, i) as f64).collect();
        record(
            "rank",
            Ok(dcs::rank_classify(&region, &oracle, q)),
            pick_one(prefixes.clone(), q),
        );

        let threshold = [0.0, 0.5, 0.7, 1.0][case % 4];
        let kept: Vec<usize> = all_pos
            .iter()
            .copied()
            .filter(|&j| {
                let agree = (0..x.p()).filter(|&i| x.preds[i][x.idx[j]] == q[i]).count();
                agree as f64 / x.p() as f64 >= threshold
            })
            .collect();
        let mut mcb = pick_one(
            bf_ola(&x, if kept.is_empty() { &all_pos } else { &kept }),
            q,
        );
        mcb.fallback = kept.is_empty();
        record(
            "mcb",
            Ok(dcs::mcb_classify(&region, &oracle, q, threshold)),
            mcb,
        );

        let margin = [0.0, 0.05, 0.2][case % 3];
        let wsum: f64 = x.dist.iter().map(|&d| w(d)).sum();
        let apriori: Vec<f64> = (0..x.p())
            .map(|i| {
                (0..x.idx.len())
                    .map(|j| x.soft[i][x.idx[j]][x.labels[x.idx[j]]] * w(x.dist[j]))
                    .sum::<f64>()
                    / wsum
            })
            .collect();
        record(
            "apriori",
            dcs::apriori_classify(&region, &oracle, q, margin, x.m),
            with_margin(apriori, &x, margin),
        );
        let apost: Vec<f64> = (0..x.p())
            .map(|i| {
                let mass = |j: usize| x.soft[i][x.idx[j]][q[i]] * w(x.dist[j]);
                let den: f64 = all_pos.iter().map(|&j| mass(j)).sum();
                let num: f64 = all_pos
                    .iter()
                    .filter(|&&j| x.labels[x.idx[j]] == q[i])
                    .map(|&j| mass(j))
                    .sum();
                if den == 0.0 {
                    0.0
                } else {
                    num / den
                }
            })
            .collect();
        record(
            "aposteriori",
            dcs::aposteriori_classify(&region, &oracle, q, margin, x.m),
            with_margin(apost, &x, margin),
        );

        let mut knora_e = None;
        for size in (1..=x.idx.len()).rev() {
            let sel: Vec<usize> = (0..x.p())
                .filter(|&i| x.idx[..size].iter().all(|&k| x.correct(i, k)))
                .collect();
            if !sel.is_empty() {
                knora_e = Some(ensemble(sel, None, &x, prefixes.clone()));
                break;
            }
        }
        let knora_e = knora_e.unwrap_or_else(|| ensemble(Vec::new(), None, &x, prefixes.clone()));
        record(
            "knora-e",
            des::knora_e_classify(&region, &oracle, q, x.m),
            knora_e,
        );

        record(
            "knora-u",
            des::knora_u_classify(&region, &oracle, q, x.m),
            knora_u_on(&x, &x.idx),
        );

        let mut by_profile: Vec<(usize, usize)> = (0..x.labels.len())
            .map(|s| ((0..x.p()).filter(|&i| x.preds[i][s] != q[i]).count(), s))
            .collect();
        by_profile.sort();
        let knop_idx: Vec<usize> = by_profile[..x.idx.len()].iter().map(|t| t.1).collect();
        record(
            "knop",
            des::knop_classify(&oracle, q, x.idx.len(), x.m),
            knora_u_on(&x, &knop_idx),
        );

        let k = x.idx.len();
        let hits: Vec<usize> = (0..x.p())
            .map(|i| x.idx.iter().filter(|&&s| x.correct(i, s)).count())
            .collect();
        let desp_vals = hits
            .iter()
            .map(|&h| h as f64 / k as f64 - 1.0 / x.m as f64)
            .collect();
        let desp_sel = (0..x.p()).filter(|&i| hits[i] * x.m > k).collect();
        record(
            "des-p",
            des::des_p_classify(&region, &oracle, q, x.m),
            ensemble(desp_sel, None, &x, desp_vals),
        );

        let kl: Vec<f64> = (0..x.p())
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let s = if x.correct(i, x.idx[j]) { 1.0 } else { -1.0 };
                        s * kl_uniform(&x.soft[i][x.idx[j]]) * w(x.dist[j])
                    })
                    .sum()
            })
            .collect();
        let kl_sel = (0..x.p()).filter(|&i| kl[i] > 1e-12).collect();
        record(
            "des-kl",
            des::des_kl_classify(&region, &oracle, q, x.m),
            ensemble(kl_sel, None, &x, kl),
        );

        let (nf, jf) = [(0.5, 0.3), (1.0, 0.5), (0.75, 0.25), (1.0, 1.0)][case % 4];
        let (sel, acc) = bf_acc_div(&x, &x.idx, nf, jf);
        record(
            "des-knn",
            des::des_knn_classify(&region, &oracle, q, nf, jf, x.m),
            ensemble(sel, None, &x, acc),
        );

        let n = x.labels.len();
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let dsel = Dataset::new("micro", points, x.labels.clone(), x.m).unwrap();
        let clusters = rng.random_range(1..=3.min(n));
        match ClusterEnsembles::fit(&dsel, &oracle, clusters, case as u64, nf, jf) {
            Ok(model) => {
                let query = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let sq = |c: &Vec<f64>| (c[0] - query[0]).powi(2) + (c[1] - query[1]).powi(2);
                let mut nearest = 0;
                for (ci, c) in model.model.centroids.iter().enumerate() {
                    if sq(c) < sq(&model.model.centroids[nearest]) {
                        nearest = ci;
                    }
                }
                let members: Vec<usize> = (0..n)
                    .filter(|&s| model.model.assignments[s] == nearest)
                    .collect();
                let members = if members.is_empty() {
                    (0..n).collect()
                } else {
                    members
                };
                let (sel, acc) = bf_acc_div(&x, &members, nf, jf);
                record(
                    "des-clustering",
                    model.classify(&query, q, x.m),
                    ensemble(sel, None, &x, acc),
                );
            }
            Err(e) => mismatches.push(format!("case {case} des-clustering fit: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && elapsed < Duration::from_secs(10);
    let mut detail = format!(
        "{checks} rule evaluations on 200 instances, {} mismatches, {:.2}s",
        mismatches.len(),
        elapsed.as_secs_f64()
    );
    if let Some(first) = mismatches.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    Line {
        id: 1,
        name: "rule outcomes match brute-force evaluators",
        pass,
        detail,
    }
}

// ---------------------------------------------------------------------------
// Criterion 2: kDN against direct counting.

fn brute_kdn(
    points: &[Vec<f64>],
    labels: &[usize],
    query: &[f64],
    label: usize,
    k: usize,
    skip: Option<usize>,
) -> usize {
    let mut order: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(i, p)| (p.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order[..k]
        .iter()
        .filter(|(_, i)| labels[*i] != label)
        .count()
}

fn criterion_kdn() -> Line {
    let points: Vec<Vec<f64>> = [
        (0, 0),
        (1, 0),
        (0, 1),
        (1, 1),
        (2, 0),
        (0, 2),
        (2, 2),
        (3, 1),
        (1, 3),
    ]
    .iter()
    .map(|&(a, b)| vec![a as f64, b as f64])
    .collect();
    let n = points.len();
    let mut checked = 0;
    let mut bad = Vec::new();
    for mask in 0u32..(1 << n) {
        let labels: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
        if labels.iter().all(|&l| l == labels[0]) {
            continue;
        }
        let ds = Dataset::new("grid", points.clone(), labels.clone(), 2).unwrap();
        for k in [1, 3, 5, 7] {
            for i in 0..n {
                let expected = brute_kdn(&points, &labels, &points[i], labels[i], k, Some(i));
                let count = kdn_count(ds.row(i), labels[i], &ds, k, Some(i)).unwrap();
                let value = kdn_of_member(&ds, i, k).unwrap();
                checked += 1;
                let scaled = value * k as f64;
                if count != expected
                    || value != expected as f64 / k as f64
                    || (scaled - scaled.round()).abs() > 1e-12
                {
                    bad.push(format!("mask {mask:#x} k {k} i {i}"));
                }
            }
        }
    }
    // non-member queries, three classes
    let mut rng = seed::rng(77);
    for _ in 0..300 {
        let m = 3;
        let n = rng.random_range(8..=14);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random_range(0..4) as f64, rng.random_range(0..4) as f64])
            .collect();
        let labels: Vec<usize> = (0..n)
            .map(|i| if i < m { i } else { rng.random_range(0..m) })
            .collect();
        let ds = Dataset::new("r", pts.clone(), labels.clone(), m).unwrap();
        let q = [
            rng.random_range(0..4) as f64 + 0.5,
            rng.random_range(0..4) as f64,
        ];
        let label = rng.random_range(0..m);
        for k in [1, 3, 5, 7] {
            let expected = brute_kdn(&pts, &labels, &q, label, k, None);
            checked += 1;
            if kdn(&q, label, &ds, k).unwrap() != expected as f64 / k as f64 {
                bad.push(format!("query {q:?} k {k}"));
            }
        }
    }
    Line {
        id: 2,
        name: "kDN equals direct neighbour counting, K in {1,3,5,7}",
        pass: bad.is_empty(),
        detail: format!(
            "{checked} values checked, {} mismatches{}",
            bad.len(),
            bad.first()
                .map(|b| format!("; first: {b}"))
                .unwrap_or_default()
        ),
    }
}

// ---------------------------------------------------------------------------
// Desk-scale criteria.

fn column(report: &ExperimentReport, name: &str) -> usize {
    report.table.technique_index(name).expect("column present")
}

fn criterion_forced_failure(report: &ExperimentReport) -> Line {
    let knn = column(report, "7-NN");
    let mut offenders = Vec::new();
    let mut hard = 0;
    for d in &report.datasets {
        let tally = &d.hardness.as_ref().expect("hardness enabled")[knn];
        for bin in 4..=7 {
            hard += tally.total[bin];
            if tally.correct[bin] > 0 {
                offenders.push(format!(
                    "{} bin {bin}/7: {}/{} correct (M={})",
                    d.name, tally.correct[bin], tally.total[bin], d.class_count
                ));
            }
        }
    }
    Line {
        id: 3,
        name: "7-NN accuracy is 0 in every kDN >= 4/7 bin",
        pass: offenders.is_empty(),
        detail: format!(
            "{hard} test instances in those bins over {} datasets; {}",
            report.datasets.len(),
            if offenders.is_empty() {
                "no correct 7-NN predictions".to_string()
            } else {
                format!("nonzero on: {}", offenders.join("; "))
            }
        ),
    }
}

fn criterion_hard_recovery(report: &ExperimentReport, elapsed: Duration) -> Line {
    let knn = column(report, "7-NN");
    let mut parts = Vec::new();
    let mut pass = elapsed < Duration::from_secs(300);
    for rule in ["KNORA-U", "DES-P", "OLA"] {
        let c = column(report, rule);
        let (mut eligible, mut positive) = (0, 0);
        for d in &report.datasets {
            let h = d.hardness.as_ref().expect("hardness enabled");
            let total: usize = h[c].total[5] + h[c].total[6];
            let knn_correct = h[knn].correct[5] + h[knn].correct[6];
            if total == 0 || knn_correct > 0 {
                continue;
            }
            eligible += 1;
            if h[c].correct[5] + h[c].correct[6] > 0 {
                positive += 1;
            }
        }
        let ok = eligible > 0 && positive * 10 >= eligible * 8;
        pass &= ok;
        parts.push(format!("{rule} {positive}/{eligible}"));
    }
    Line {
        id: 4,
        name: "DS is right on some kDN 5/7 and 6/7 instances on >= 80% of datasets",
        pass,
        detail: format!(
            "{}; desk run {:.1}s",
            parts.join(", "),
            elapsed.as_secs_f64()
        ),
    }
}

fn hundredths(v: f64) -> i64 {
    (v * 100.0).round() as i64
}

fn criterion_ds_vs_knn(report: &ExperimentReport) -> Line {
    let n = report.table.datasets.len();
    let knn = column(report, "7-NN");
    let mut pass = n >= 10;
    let mut parts = vec![format!("{n} datasets")];
    for rule in ["KNORA-U", "DES-P"] {
        let c = column(report, rule);
        let at_least = report
            .table
            .mean
            .iter()
            .filter(|row| hundredths(row[c]) >= hundredths(row[knn]))
            .count();
        pass &= at_least * 10 >= n * 7;
        parts.push(format!("{rule} >= 7-NN on {at_least}/{n}"));
    }
    let mut ds_ranks: Vec<f64> = report
        .ranks
        .iter()
        .filter(|r| !r.technique.ends_with("-NN"))
        .map(|r| r.average_rank)
        .collect();
    ds_ranks.sort_by(f64::total_cmp);
    let mid = ds_ranks.len() / 2;
    let median = if ds_ranks.len().is_multiple_of(2) {
        (ds_ranks[mid - 1] + ds_ranks[mid]) / 2.0
    } else {
        ds_ranks[mid]
    };
    for b in ["1-NN", "7-NN"] {
        let r = report.ranks[column(report, b)].average_rank;
        pass &= r > median;
        parts.push(format!("{b} rank {r:.2}"));
    }
    parts.push(format!("median technique rank {median:.2}"));
    Line {
        id: 5,
        name: "KNORA-U and DES-P match or beat 7-NN; baselines rank below the median",
        pass,
        detail: parts.join(", "),
    }
}

fn criterion_critical_values() -> Line {
    let a = sign_test_critical(30, Alpha::P05).unwrap();
    let b = sign_test_critical(30, Alpha::P01).unwrap();
    // independent evaluation of n/2 + z sqrt(n)/2
    let oracle = |z: f64| (15.0 + z * 30f64.sqrt() / 2.0).ceil() as usize;
    Line {
        id: 6,
        name: "sign-test critical values for 30 experiments",
        pass: a == 20 && b == 22 && a == oracle(1.645) && b == oracle(2.326),
        detail: format!("alpha 0.05 -> {a}, alpha 0.01 -> {b}"),
    }
}

fn criterion_tie_rule(report: &ExperimentReport) -> Line {
    let table = ResultsTable::new(
        vec!["d0".into(), "d1".into()],
        vec!["A".into(), "B".into(), "C".into()],
        vec![vec![80.0, 80.0, 75.0], vec![70.0, 90.0, 60.0]],
        vec![vec![0.0; 3]; 2],
    )
    .unwrap();
    let row = ranks_for_row(&table.mean[0]);
    let ranks = friedman_ranks(&table).unwrap();
    let mut pass = row == vec![1.5, 1.5, 3.0]
        && ranks.iter().map(|r| r.average_rank).collect::<Vec<_>>() == vec![1.75, 1.25, 3.0];
    let mut sums_ok = 0;
    for t in [&table, &report.table] {
        let tt = t.techniques.len() as f64;
        for r in &t.mean {
            let s: f64 = ranks_for_row(r).iter().sum();
            if (s - tt * (tt + 1.0) / 2.0).abs() < 1e-9 {
                sums_ok += 1;
            } else {
                pass = false;
            }
        }
    }
    Line {
        id: 7,
        name: "two-way tie shares rank 1.5; per-dataset rank sums are T(T+1)/2",
        pass,
        detail: format!("tied row ranks {row:?}; {sums_ok} rank sums verified"),
    }
}

fn criterion_hybrid(report: &ExperimentReport, data_dir: &std::path::Path) -> Line {
    // bitwise route equivalence at the degenerate thresholds
    let mut sets: Vec<Dataset> = [
        SyntheticKind::Banana,
        SyntheticKind::Moons,
        SyntheticKind::Lithuanian,
    ]
    .into_iter()
    .map(|k| generate_synthetic(k, 400, 0.3, 3).unwrap())
    .collect();
    for f in ["wine", "wdbc"] {
        let path = data_dir.join(format!("{f}.csv"));
        sets.push(
            dynsel::data::ingest_csv(&path, &Default::default())
                .unwrap()
                .dataset,
        );
    }
    let mut queries = 0;
    let mut bitwise = true;
    for ds in &sets {
        let spec = dynsel::SplitSpec {
            seed: 11,
            ..Default::default()
        };
        let parts = stratified_split(ds, &spec, 0).unwrap();
        let stats = fit_standardizer(&parts.train).unwrap();
        let train = apply_standardizer(&stats, &parts.train).unwrap();
        let dsel = apply_standardizer(&stats, &parts.dsel).unwrap();
        let test = apply_standardizer(&stats, &parts.test).unwrap();
        let merged = train.concat(&dsel).unwrap();
        let pool = bagging_generate(&train, 25, &PerceptronParams::default(), 5).unwrap();
        let selector = DynamicSelector::new(pool, dsel, RuleParams::default()).unwrap();
        let knn = KnnClassifier::new(merged.clone(), 7).unwrap();
        for technique in [Technique::KnoraU, Technique::Ola, Technique::DesP] {
            let ds_side = HybridClassifier::new(0.0, technique, merged.clone(), 7).unwrap();
            let knn_side = HybridClassifier::new(1.0 + 1e-9, technique, merged.clone(), 7).unwrap();
            for qx in test.rows() {
                queries += 1;
                let (a, ra) = ds_side.classify(qx, &selector).unwrap();
                let (b, rb) = knn_side.classify(qx, &selector).unwrap();
                bitwise &= ra == Route::Ds && a == selector.predict(technique, qx).unwrap();
                bitwise &= rb == Route::Knn && b == knn.predict(qx).unwrap();
            }
        }
    }

    let mut good = 0;
    let mut routed = (0usize, 0usize);
    let mut misses = Vec::new();
    for d in &report.datasets {
        let recs = d.hybrid();
        let n = recs.len() as f64;
        let mean = |f: &dyn Fn(&dynsel::harness::HybridRecord) -> f64| {
            recs.iter().map(|r| f(r)).sum::<f64>() / n
        };
        let (h, ds, kn) = (
            mean(&|r| r.accuracy),
            mean(&|r| r.ds_accuracy),
            mean(&|r| r.knn_accuracy),
        );
        for r in &recs {
            routed.0 += r.routing.ds;
            routed.1 += r.routing.ds + r.routing.knn;
        }
        if hundredths(h) >= hundredths(kn) && hundredths(h) >= hundredths(ds - 1.0) {
            good += 1;
        } else {
            misses.push(format!("{} ({h:.2} vs K-NN {kn:.2}, DS {ds:.2})", d.name));
        }
    }
    let n = report.datasets.len();
    let frac = routed.0 as f64 / routed.1.max(1) as f64;
    let pass = bitwise && n > 0 && good * 10 >= n * 7 && frac < 0.5;
    Line {
        id: 8,
        name: "hybrid: degenerate thresholds are exact; tau 0.4 keeps accuracy with under half the queries on DS",
        pass,
        detail: format!(
            "bitwise route checks on {queries} queries: {}; accuracy condition on {good}/{n} datasets; {:.1}% routed to DS{}",
            if bitwise { "equal" } else { "DIFFER" },
            100.0 * frac,
            if misses.is_empty() { String::new() } else { format!("; short on {}", misses.join(", ")) }
        ),
    }
}

fn main() -> ExitCode {
    let data_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let mut lines = vec![criterion_rules(), criterion_kdn()];

    let config = ExperimentConfig::desk(&data_dir);
    let t0 = Instant::now();
    let first = dynsel::harness::run_experiment(&config).expect("desk run");
    let elapsed = t0.elapsed();
    let second = dynsel::harness::run_experiment(&config).expect("second desk run");

    if !first.failures.is_empty() {
        eprintln!("desk failures: {:?}", first.failures);
    }
    lines.push(criterion_forced_failure(&first));
    lines.push(criterion_hard_recovery(&first, elapsed));
    lines.push(criterion_ds_vs_knn(&first));
    lines.push(criterion_critical_values());
    lines.push(criterion_tie_rule(&first));
    lines.push(criterion_hybrid(&first, &data_dir));
    let (a, b) = (
        first.canonical_json().unwrap(),
        second.canonical_json().unwrap(),
    );
    lines.push(Line {
        id: 9,
        name: "two desk runs with one master seed give identical reports",
        pass: a == b && first.failures.is_empty(),
        detail: format!("{} bytes each, {} datasets", a.len(), first.datasets.len()),
    });

    let mut failed = 0;
    for l in &lines {
        println!(
            "{} [{}] {}: {}",
            if l.pass { "PASS" } else { "FAIL" },
            l.id,
            l.name,
            l.detail
        );
        failed += usize::from(!l.pass);
    }
    println!(
        "{} of {} criteria passed",
        lines.len() - failed,
        lines.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
