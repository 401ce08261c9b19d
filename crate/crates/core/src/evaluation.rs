//! Cross-dataset comparison of techniques: Friedman average ranks, the sign
//! test on win counts, and win/tie/loss tallies.
//!
//! Accuracy comparisons are made on values rounded to two decimals (percent),
//! so ties are reproducible rather than floating-point coincidences.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean accuracy (percent) per dataset and technique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub datasets: Vec<String>,
    pub techniques: Vec<String>,
    /// `mean[dataset][technique]`, in `[0, 100]`.
    pub mean: Vec<Vec<f64>>,
    /// Standard deviation across replications, same layout.
    pub std: Vec<Vec<f64>>,
}

impl ResultsTable {
    pub fn new(
        datasets: Vec<String>,
        techniques: Vec<String>,
        mean: Vec<Vec<f64>>,
        std: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let table = ResultsTable {
            datasets,
            techniques,
            mean,
            std,
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        for grid in [&self.mean, &self.std] {
            if grid.len() != self.datasets.len() {
                return Err(Error::Dimension {
                    expected: self.datasets.len(),
                    got: grid.len(),
                });
            }
            for row in grid {
                if row.len() != self.techniques.len() {
                    return Err(Error::Dimension {
                        expected: self.techniques.len(),
                        got: row.len(),
                    });
                }
            }
        }
        if self
            .mean
            .iter()
            .flatten()
            .any(|v| !v.is_finite() || *v < 0.0 || *v > 100.0)
        {
            return Err(Error::InvalidDataset(
                "accuracies must lie in [0, 100]".into(),
            ));
        }
        Ok(())
    }

    pub fn technique_index(&self, name: &str) -> Result<usize> {
        self.techniques
            .iter()
            .position(|t| t == name)
            .ok_or_else(|| Error::Unknown {
                what: "technique",
                name: name.to_string(),
            })
    }

    /// Mean over datasets of each technique's accuracy.
    pub fn average_accuracy(&self) -> Vec<f64> {
        let n = self.datasets.len().max(1) as f64;
        (0..self.techniques.len())
            .map(|t| self.mean.iter().map(|row| row[t]).sum::<f64>() / n)
            .collect()
    }

    /// `dataset,<technique>...` header followed by one row of mean accuracies per dataset.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset");
        for t in &self.techniques {
            out.push(',');
            out.push_str(&csv_field(t));
        }
        out.push('\n');
        for (d, row) in self.datasets.iter().zip(&self.mean) {
            out.push_str(&csv_field(d));
            for v in row {
                out.push_str(&format!(",{v:.4}"));
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Accuracy in hundredths of a percent, the precision used for comparisons.
fn rounded(v: f64) -> i64 {
    (v * 100.0).round() as i64
}

/// Rank of every technique on one dataset: best accuracy gets 1, tied
/// techniques share the mean of the positions they span.
pub fn ranks_for_row(row: &[f64]) -> Vec<f64> {
    let keys: Vec<i64> = row.iter().map(|&v| rounded(v)).collect();
    keys.iter()
        .map(|&k| {
            let better = keys.iter().filter(|&&o| o > k).count();
            let tied = keys.iter().filter(|&&o| o == k).count();
            // positions better+1 ..= better+tied
            better as f64 + (tied as f64 + 1.0) / 2.0
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    pub technique: String,
    pub average_rank: f64,
    pub rank_std: f64,
}

/// Friedman average rank per technique, in table column order. Lower is better.
pub fn friedman_ranks(table: &ResultsTable) -> Result<Vec<RankSummary>> {
    if table.techniques.is_empty() || table.datasets.is_empty() {
        return Err(Error::Empty(
            "ranking needs at least one technique and one dataset".into(),
        ));
    }
    let per_dataset: Vec<Vec<f64>> = table.mean.iter().map(|row| ranks_for_row(row)).collect();
    let n = per_dataset.len() as f64;
    Ok(table
        .techniques
        .iter()
        .enumerate()
        .map(|(t, name)| {
            let avg = per_dataset.iter().map(|r| r[t]).sum::<f64>() / n;
            let var = per_dataset
                .iter()
                .map(|r| (r[t] - avg).powi(2))
                .sum::<f64>()
                / n;
            RankSummary {
                technique: name.clone(),
                average_rank: avg,
                rank_std: var.sqrt(),
            }
        })
        .collect())
}

/// Significance levels with tabulated one-sided normal quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alpha {
    #[serde(rename = "0.10")]
    P10,
    #[serde(rename = "0.05")]
    P05,
    #[serde(rename = "0.01")]
    P01,
}

impl Alpha {
    pub const ALL: [Alpha; 3] = [Alpha::P10, Alpha::P05, Alpha::P01];

    pub fn z(&self) -> f64 {
        match self {
            Alpha::P10 => 1.282,
            Alpha::P05 => 1.645,
            Alpha::P01 => 2.326,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Alpha::P10 => 0.10,
            Alpha::P05 => 0.05,
            Alpha::P01 => 0.01,
        }
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Alpha::ALL
            .into_iter()
            .find(|a| (a.value() - v).abs() < 1e-12)
            .ok_or_else(|| Error::Unknown {
                what: "significance level",
                name: v.to_string(),
            })
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.value())
    }
}

/// Minimum number of wins out of `n_exp` comparisons that rejects equivalence:
/// `ceil(n_exp / 2 + z_alpha * sqrt(n_exp) / 2)`.
pub fn sign_test_critical(n_exp: usize, alpha: Alpha) -> Result<usize> {
    if n_exp == 0 {
        return Err(Error::Empty(
            "sign test needs at least one experiment".into(),
        ));
    }
    let n = n_exp as f64;
    Ok((n / 2.0 + alpha.z() * n.sqrt() / 2.0).ceil() as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinTieLoss {
    pub technique: String,
    pub baseline: String,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

/// Wins, ties and losses of every technique against `baseline`.
pub fn win_tie_loss(table: &ResultsTable, baseline: &str) -> Result<Vec<WinTieLoss>> {
    let b = table.technique_index(baseline)?;
    Ok(table
        .techniques
        .iter()
        .enumerate()
        .map(|(t, name)| {
            let mut wtl = WinTieLoss {
                technique: name.clone(),
                baseline: baseline.to_string(),
                wins: 0,
                ties: 0,
                losses: 0,
            };
            for row in &table.mean {
                match rounded(row[t]).cmp(&rounded(row[b])) {
                    std::cmp::Ordering::Greater => wtl.wins += 1,
                    std::cmp::Ordering::Equal => wtl.ties += 1,
                    std::cmp::Ordering::Less => wtl.losses += 1,
                }
            }
            wtl
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignTestLevel {
    pub alpha: Alpha,
    pub critical_wins: usize,
    pub significant: bool,
}

/// Win/tie/loss plus the sign-test verdict at every tabulated level.
/// Only strict wins count toward the critical value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    #[serde(flatten)]
    pub counts: WinTieLoss,
    pub n_exp: usize,
    pub levels: Vec<SignTestLevel>,
}

pub fn sign_test(counts: WinTieLoss) -> Result<SignTest> {
    let n_exp = counts.wins + counts.ties + counts.losses;
    let levels = Alpha::ALL
        .into_iter()
        .map(|alpha| {
            let critical_wins = sign_test_critical(n_exp, alpha)?;
            Ok(SignTestLevel {
                alpha,
                critical_wins,
                significant: counts.wins >= critical_wins,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SignTest {
        counts,
        n_exp,
        levels,
    })
}
