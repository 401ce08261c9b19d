use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::DatasetResult;
use crate::error::{Error, Result};
use crate::evaluation::{
    csv_field, friedman_ranks, sign_test, win_tie_loss, RankSummary, ResultsTable, SignTest,
};

pub const REPORT_SCHEMA: &str = "dynsel-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the TOML rendering of the config that was run.
    pub config_hash: String,
    pub master_seed: u64,
    pub crate_version: String,
    /// Seconds since the Unix epoch; omitted from the canonical payload.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetFailure {
    pub dataset: String,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub provenance: Provenance,
    pub config: ExperimentConfig,
    /// Mean (std) accuracy per dataset and column, percent.
    pub table: ResultsTable,
    /// Column order; empty when no dataset succeeded.
    pub ranks: Vec<RankSummary>,
    pub average_accuracy: Vec<f64>,
    /// Every column against every K-NN baseline.
    pub sign_tests: Vec<SignTest>,
    pub datasets: Vec<DatasetResult>,
    pub failures: Vec<DatasetFailure>,
}

impl ExperimentReport {
    pub(crate) fn assemble(
        config: ExperimentConfig,
        datasets: Vec<DatasetResult>,
        failures: Vec<DatasetFailure>,
    ) -> Result<Self> {
        let toml = config.to_toml_string()?;
        let config_hash = hex::encode(Sha256::digest(toml.as_bytes()));
        let table = ResultsTable::new(
            datasets.iter().map(|d| d.name.clone()).collect(),
            config.columns(),
            datasets.iter().map(|d| d.mean.clone()).collect(),
            datasets.iter().map(|d| d.std.clone()).collect(),
        )?;
        let (ranks, average_accuracy, sign_tests) = if datasets.is_empty() {
            (Vec::new(), Vec::new(), Vec::new())
        } else {
            let mut tests = Vec::new();
            for &k in &config.baselines {
                for wtl in win_tie_loss(&table, &super::baseline_label(k))? {
                    if wtl.technique != wtl.baseline {
                        tests.push(sign_test(wtl)?);
                    }
                }
            }
            (friedman_ranks(&table)?, table.average_accuracy(), tests)
        };
        let generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        Ok(ExperimentReport {
            schema: REPORT_SCHEMA.into(),
            provenance: Provenance {
                config_hash,
                master_seed: config.master_seed,
                crate_version: env!("CARGO_PKG_VERSION").into(),
                generated_at,
            },
            config,
            table,
            ranks,
            average_accuracy,
            sign_tests,
            datasets,
            failures,
        })
    }

    /// Ranks sorted best first; ties keep column order.
    pub fn sorted_ranks(&self) -> Vec<RankSummary> {
        let mut r = self.ranks.clone();
        r.sort_by(|a, b| a.average_rank.total_cmp(&b.average_rank));
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON without the timestamp, for byte comparison of reruns.
    pub fn canonical_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.provenance.generated_at = None;
        copy.to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: ExperimentReport = serde_json::from_str(text)?;
        if report.schema != REPORT_SCHEMA {
            return Err(Error::Serialization(format!(
                "unsupported report schema `{}`",
                report.schema
            )));
        }
        Ok(report)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// `dataset,bin,level,technique,count,correct,accuracy`, one row per
    /// nonempty bin.
    pub fn hardness_csv(&self) -> String {
        let mut out = String::from("dataset,bin,level,technique,count,correct,accuracy\n");
        let k = self.config.k;
        for d in &self.datasets {
            let Some(tallies) = &d.hardness else { continue };
            for (col, tally) in self.table.techniques.iter().zip(tallies) {
                for b in 0..tally.total.len() {
                    if tally.total[b] == 0 {
                        continue;
                    }
                    let _ = writeln!(
                        out,
                        "{},{b},{:.6},{},{},{},{:.6}",
                        csv_field(&d.name),
                        b as f64 / k as f64,
                        csv_field(col),
                        tally.total[b],
                        tally.correct[b],
                        tally.correct[b] as f64 / tally.total[b] as f64
                    );
                }
            }
        }
        out
    }

    /// Accuracy per bin pooled over all datasets: `bin,level,technique,count,accuracy`.
    pub fn hardness_curves_csv(&self) -> String {
        let mut out = String::from("bin,level,technique,count,accuracy\n");
        let k = self.config.k;
        for (c, col) in self.table.techniques.iter().enumerate() {
            let mut total = vec![0usize; k + 1];
            let mut correct = vec![0usize; k + 1];
            for d in &self.datasets {
                if let Some(t) = d.hardness.as_ref().map(|h| &h[c]) {
                    for b in 0..t.total.len().min(k + 1) {
                        total[b] += t.total[b];
                        correct[b] += t.correct[b];
                    }
                }
            }
            for b in 0..=k {
                if total[b] > 0 {
                    let _ = writeln!(
                        out,
                        "{b},{:.6},{},{},{:.6}",
                        b as f64 / k as f64,
                        csv_field(col),
                        total[b],
                        correct[b] as f64 / total[b] as f64
                    );
                }
            }
        }
        out
    }

    pub fn ranks_csv(&self) -> String {
        let mut out = String::from("technique,average_rank,rank_std,average_accuracy\n");
        for r in self.sorted_ranks() {
            let acc = self
                .table
                .technique_index(&r.technique)
                .ok()
                .and_then(|i| self.average_accuracy.get(i).copied())
                .unwrap_or(f64::NAN);
            let _ = writeln!(
                out,
                "{},{:.4},{:.4},{:.4}",
                csv_field(&r.technique),
                r.average_rank,
                r.rank_std,
                acc
            );
        }
        out
    }

    pub fn sign_tests_csv(&self) -> String {
        let mut out = String::from(
            "technique,baseline,wins,ties,losses,n_exp,critical_0.10,critical_0.05,critical_0.01\n",
        );
        for s in &self.sign_tests {
            let _ = write!(
                out,
                "{},{},{},{},{},{}",
                csv_field(&s.counts.technique),
                csv_field(&s.counts.baseline),
                s.counts.wins,
                s.counts.ties,
                s.counts.losses,
                s.n_exp
            );
            for l in &s.levels {
                let _ = write!(out, ",{}", l.critical_wins);
            }
            out.push('\n');
        }
        out
    }

    pub fn hybrid_csv(&self) -> String {
        let mut out = String::from(
            "dataset,replication,threshold,accuracy,ds_accuracy,knn_accuracy,ds_fraction\n",
        );
        for d in &self.datasets {
            for r in &d.replications {
                if let Some(h) = &r.hybrid {
                    let _ = writeln!(
                        out,
                        "{},{},{},{:.4},{:.4},{:.4},{:.4}",
                        csv_field(&d.name),
                        r.replication,
                        h.threshold,
                        h.accuracy,
                        h.ds_accuracy,
                        h.knn_accuracy,
                        h.routing.ds_fraction()
                    );
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [
        ReportFormat::Json,
        ReportFormat::Csv,
        ReportFormat::Markdown,
    ];
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(Error::Unknown {
                what: "report format",
                name: s.to_string(),
            }),
        }
    }
}

/// Markdown summary: ranking, Avg. Rank / Avg. Accuracy pairing, per-dataset
/// means, sign tests, hybrid routing and failures.
pub fn render_markdown(report: &ExperimentReport) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# {}\n", report.config.name);
    let _ = writeln!(
        md,
        "master seed `{}`, config `{}`, {} replications, pool of {}, K = {}\n",
        report.provenance.master_seed,
        &report.provenance.config_hash[..12.min(report.provenance.config_hash.len())],
        report.config.split.replications,
        report.config.pool.size,
        report.config.k
    );

    let ranks = report.sorted_ranks();
    let mut by_acc: Vec<(String, f64)> = report
        .table
        .techniques
        .iter()
        .cloned()
        .zip(report.average_accuracy.iter().copied())
        .collect();
    by_acc.sort_by(|a, b| b.1.total_cmp(&a.1));

    md.push_str("## Ranking\n\n| Algorithm | Avg. Rank | Algorithm | Avg. Accuracy |\n|---|---:|---|---:|\n");
    for (r, (name, acc)) in ranks.iter().zip(&by_acc) {
        let _ = writeln!(
            md,
            "| {} | {:.2} ({:.2}) | {} | {:.2} |",
            r.technique, r.average_rank, r.rank_std, name, acc
        );
    }

    md.push_str("\n## Accuracy per dataset\n\nMean (standard deviation) over replications, percent.\n\n| Dataset |");
    for t in &report.table.techniques {
        let _ = write!(md, " {t} |");
    }
    md.push_str("\n|---|");
    md.push_str(&"---:|".repeat(report.table.techniques.len()));
    md.push('\n');
    for (d, (mean, std)) in report
        .table
        .datasets
        .iter()
        .zip(report.table.mean.iter().zip(&report.table.std))
    {
        let _ = write!(md, "| {d} |");
        for (m, s) in mean.iter().zip(std) {
            let _ = write!(md, " {m:.2} ({s:.2}) |");
        }
        md.push('\n');
    }

    if !report.sign_tests.is_empty() {
        md.push_str("\n## Sign test\n\n| Technique | Baseline | W | T | L | n_c (0.10) | n_c (0.05) | n_c (0.01) |\n|---|---|---:|---:|---:|---:|---:|---:|\n");
        for s in &report.sign_tests {
            let _ = write!(
                md,
                "| {} | {} | {} | {} | {} |",
                s.counts.technique,
                s.counts.baseline,
                s.counts.wins,
                s.counts.ties,
                s.counts.losses
            );
            for l in &s.levels {
                let mark = if l.significant { "*" } else { "" };
                let _ = write!(md, " {}{mark} |", l.critical_wins);
            }
            md.push('\n');
        }
        md.push_str("\n`*` marks levels where the win count reaches the critical value.\n");
    }

    let hybrid: Vec<_> = report
        .datasets
        .iter()
        .filter(|d| !d.hybrid().is_empty())
        .collect();
    if !hybrid.is_empty() {
        let _ = writeln!(
            md,
            "\n## Hybrid (tau = {}, DS rule {})\n\n| Dataset | Hybrid | DS alone | K-NN alone | Routed to DS |\n|---|---:|---:|---:|---:|",
            report.config.hybrid.threshold,
            report.config.hybrid.technique.label()
        );
        for d in hybrid {
            let h = d.hybrid();
            let n = h.len() as f64;
            let avg =
                |f: &dyn Fn(&super::HybridRecord) -> f64| h.iter().map(|r| f(r)).sum::<f64>() / n;
            let _ = writeln!(
                md,
                "| {} | {:.2} | {:.2} | {:.2} | {:.1}% |",
                d.name,
                avg(&|r| r.accuracy),
                avg(&|r| r.ds_accuracy),
                avg(&|r| r.knn_accuracy),
                100.0 * avg(&|r| r.routing.ds_fraction())
            );
        }
    }

    if report.datasets.iter().any(|d| d.hardness.is_some()) {
        md.push_str("\n## Accuracy by instance hardness\n\nPlot data (all datasets pooled) is in `hardness_curves.csv`.\n");
    }

    if !report.failures.is_empty() {
        md.push_str("\n## Failed datasets\n\n");
        for f in &report.failures {
            let _ = writeln!(md, "- `{}` ({}): {}", f.dataset, f.kind, f.message);
        }
    }
    md
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes `report` to `dir` in the given format and returns the files written.
///
/// * json: `report.json`
/// * csv: `accuracy.csv`, `accuracy_std.csv`, `ranks.csv`, `sign_tests.csv`,
///   `hardness.csv`, `hybrid.csv`
/// * markdown: `report.md` plus `hardness_curves.csv`
pub fn report_render(
    report: &ExperimentReport,
    format: ReportFormat,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    match format {
        ReportFormat::Json => write_file(dir, "report.json", &report.to_json()?, &mut written)?,
        ReportFormat::Csv => {
            write_file(dir, "accuracy.csv", &report.table.to_csv(), &mut written)?;
            let std_table = ResultsTable {
                mean: report.table.std.clone(),
                ..report.table.clone()
            };
            write_file(dir, "accuracy_std.csv", &std_table.to_csv(), &mut written)?;
            write_file(dir, "ranks.csv", &report.ranks_csv(), &mut written)?;
            write_file(
                dir,
                "sign_tests.csv",
                &report.sign_tests_csv(),
                &mut written,
            )?;
            write_file(dir, "hardness.csv", &report.hardness_csv(), &mut written)?;
            write_file(dir, "hybrid.csv", &report.hybrid_csv(), &mut written)?;
        }
        ReportFormat::Markdown => {
            write_file(dir, "report.md", &render_markdown(report), &mut written)?;
            write_file(
                dir,
                "hardness_curves.csv",
                &report.hardness_curves_csv(),
                &mut written,
            )?;
        }
    }
    Ok(written)
}

/// Sign test of each column shared by two reports, report `a` against `b`,
/// over the datasets both contain.
pub fn compare_reports(a: &ExperimentReport, b: &ExperimentReport) -> Result<Vec<SignTest>> {
    let datasets: Vec<String> = a
        .table
        .datasets
        .iter()
        .filter(|d| b.table.datasets.contains(d))
        .cloned()
        .collect();
    if datasets.is_empty() {
        return Err(Error::Empty("the reports share no datasets".into()));
    }
    let mut out = Vec::new();
    for (ca, name) in a.table.techniques.iter().enumerate() {
        let Ok(cb) = b.table.technique_index(name) else {
            continue;
        };
        let mean = datasets
            .iter()
            .map(|d| {
                let ia = a
                    .table
                    .datasets
                    .iter()
                    .position(|x| x == d)
                    .unwrap_or_default();
                let ib = b
                    .table
                    .datasets
                    .iter()
                    .position(|x| x == d)
                    .unwrap_or_default();
                vec![a.table.mean[ia][ca], b.table.mean[ib][cb]]
            })
            .collect::<Vec<_>>();
        let pair = ResultsTable::new(
            datasets.clone(),
            vec![format!("{name} (a)"), format!("{name} (b)")],
            mean,
            vec![vec![0.0, 0.0]; datasets.len()],
        )?;
        let wtl = win_tie_loss(&pair, &pair.techniques[1])?.swap_remove(0);
        out.push(sign_test(wtl)?);
    }
    if out.is_empty() {
        return Err(Error::Empty("the reports share no techniques".into()));
    }
    Ok(out)
}
