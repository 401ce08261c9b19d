use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::seed;

/// Partition proportions for training, dynamic-selection and test sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub dsel_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
    pub replications: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.25,
            dsel_fraction: 0.50,
            test_fraction: 0.25,
            seed: 0,
            replications: 20,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let f = [self.train_fraction, self.dsel_fraction, self.test_fraction];
        if f.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidSplit(format!(
                "fractions must be positive, got {f:?}"
            )));
        }
        let sum: f64 = f.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplit(format!(
                "fractions sum to {sum}, expected 1"
            )));
        }
        if self.replications == 0 {
            return Err(Error::InvalidSplit("replications must be positive".into()));
        }
        Ok(())
    }

    fn fractions(&self) -> [f64; 3] {
        [self.train_fraction, self.dsel_fraction, self.test_fraction]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partitions {
    pub train: Dataset,
    pub dsel: Dataset,
    pub test: Dataset,
}

/// Per-class counts for the three partitions.
///
/// Each entry is the floor or ceiling of its exact share. The units left
/// over after flooring go to the partitions with the largest remainder plus
/// running shortfall, which keeps partition totals close to their targets
/// across classes.
pub(crate) fn allocate(class_counts: &[usize], fractions: [f64; 3]) -> Vec<[usize; 3]> {
    let mut shortfall = [0.0f64; 3];
    let mut out = Vec::with_capacity(class_counts.len());
    for &n_c in class_counts {
        let exact: [f64; 3] = fractions.map(|f| f * n_c as f64);
        let mut alloc: [usize; 3] = exact.map(|e| (e + 1e-9).floor() as usize);
        let mut spare = n_c - alloc.iter().sum::<usize>().min(n_c);
        let mut order = [0usize, 1, 2];
        // Only partitions with a fractional share may round up.
        let key = |p: usize| {
            let frac = exact[p] - alloc[p] as f64;
            (frac > 1e-9, frac + shortfall[p])
        };
        order.sort_by(|&a, &b| {
            let (ea, ka) = key(a);
            let (eb, kb) = key(b);
            eb.cmp(&ea).then(kb.total_cmp(&ka)).then(a.cmp(&b))
        });
        for &p in order.iter().cycle() {
            if spare == 0 {
                break;
            }
            alloc[p] += 1;
            spare -= 1;
        }
        // One instance per partition whenever the class is large enough.
        if n_c >= 3 {
            for p in 0..3 {
                if alloc[p] == 0 {
                    let donor = (0..3).max_by_key(|&q| (alloc[q], 3 - q)).unwrap();
                    alloc[donor] -= 1;
                    alloc[p] += 1;
                }
            }
        }
        for p in 0..3 {
            shortfall[p] += exact[p] - alloc[p] as f64;
        }
        out.push(alloc);
    }
    out
}

/// Splits `ds` into train/DSEL/test while preserving class priors.
///
/// The shuffle is keyed by `(spec.seed, replication)`, so each replication
/// is reproducible on its own.
pub fn stratified_split(ds: &Dataset, spec: &SplitSpec, replication: usize) -> Result<Partitions> {
    spec.validate()?;
    let counts = ds.class_counts();
    if let Some((class, &count)) = counts.iter().enumerate().find(|(_, &c)| c < 3) {
        return Err(Error::ClassTooSmall {
            class,
            count,
            needed: 3,
        });
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.class_count()];
    for (i, &l) in ds.labels().iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = seed::rng(seed::derive(spec.seed, replication as u64));
    let alloc = allocate(&counts, spec.fractions());
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (members, a) in by_class.iter_mut().zip(&alloc) {
        members.shuffle(&mut rng);
        let mut rest = members.as_slice();
        for p in 0..3 {
            let (take, tail) = rest.split_at(a[p]);
            parts[p].extend_from_slice(take);
            rest = tail;
        }
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    Ok(Partitions {
        train: ds.subset(&parts[0]),
        dsel: ds.subset(&parts[1]),
        test: ds.subset(&parts[2]),
    })
}
