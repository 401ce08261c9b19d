use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use dynsel::data::{
    apply_standardizer, fit_standardizer, generate_synthetic, ingest_csv, write_csv, LabelColumn,
    SyntheticKind,
};
use dynsel::hardness::profile_self;
use dynsel::harness::{
    compare_reports, report_render, run_experiment, ExperimentConfig, ExperimentReport,
    ReportFormat, OUTPUT_DIR_ENV,
};
use dynsel::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dynsel",
    version,
    about = "Dynamic classifier and ensemble selection experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Desk,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment sweep and write reports.
    Run {
        /// TOML config file.
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Built-in config instead of a file.
        #[arg(long)]
        preset: Option<Preset>,
        /// Directory holding the CSV fixtures, for presets.
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        /// Output directory; overrides the config and the DYNSEL_OUTPUT_DIR variable.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report formats to write (json, csv, markdown).
        #[arg(long, value_delimiter = ',', default_value = "json,csv,markdown")]
        format: Vec<String>,
        /// Override the number of replications.
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Leave-one-out kDN profile of a CSV dataset.
    Hardness {
        /// CSV file with a header row.
        data: PathBuf,
        /// Label column, by name or zero-based index.
        #[arg(long, default_value = "class")]
        label: LabelColumn,
        #[arg(short, long, default_value_t = 7)]
        k: usize,
        /// Skip z-scoring the features first.
        #[arg(long)]
        raw: bool,
        /// Write per-instance values here as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in config as TOML.
    Config {
        #[arg(long, default_value = "desk")]
        preset: Preset,
        /// Directory holding the CSV fixtures, as written into the file.
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
    },
    /// Sign test of report A against report B on their shared datasets.
    Compare { a: PathBuf, b: PathBuf },
    /// Write a synthetic two-class dataset as CSV.
    Generate {
        #[arg(long)]
        kind: SyntheticKind,
        #[arg(short, long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).unwrap_or_default()
    );
}

fn preset_config(preset: Preset, data_dir: &Path) -> ExperimentConfig {
    match preset {
        Preset::Desk => ExperimentConfig::desk(data_dir),
        Preset::Full => ExperimentConfig::full(data_dir),
    }
}

fn run(
    config: Option<PathBuf>,
    preset: Option<Preset>,
    data_dir: &Path,
    out: Option<PathBuf>,
    formats: &[String],
    replications: Option<usize>,
) -> Result<()> {
    let formats = formats
        .iter()
        .map(|f| f.parse())
        .collect::<Result<Vec<ReportFormat>>>()?;
    let mut cfg = match (config, preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, preset) => preset_config(preset.unwrap_or(Preset::Desk), data_dir),
    };
    if let Some(r) = replications {
        cfg.split.replications = r;
    }
    if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
        cfg.output_dir = dir.into();
    }
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    let report = run_experiment(&cfg)?;
    let mut files = Vec::new();
    for f in formats {
        files.extend(report_render(&report, f, &cfg.output_dir)?);
    }
    let best = report.sorted_ranks().first().map(|r| r.technique.clone());
    print_json(&json!({
        "datasets": report.datasets.len(),
        "failures": report.failures,
        "best_rank": best,
        "files": files,
    }));
    Ok(())
}

fn hardness(
    data: &Path,
    label: &LabelColumn,
    k: usize,
    raw: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut ds = ingest_csv(data, label)?.dataset;
    if !raw {
        let stats = fit_standardizer(&ds)?;
        ds = apply_standardizer(&stats, &ds)?;
    }
    let profile = profile_self(&ds, k)?;
    let bins = profile.bins();
    if let Some(path) = out {
        let mut text = String::from("index,label,kdn\n");
        for (i, c) in profile.counts.iter().enumerate() {
            text.push_str(&format!(
                "{i},{},{}\n",
                ds.class_names()[ds.label(i)],
                *c as f64 / k as f64
            ));
        }
        std::fs::write(&path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    let values = profile.values();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    print_json(&json!({
        "dataset": ds.name(),
        "instances": ds.len(),
        "k": k,
        "mean_kdn": mean,
        "bins": (0..=k).map(|b| json!({"bin": b, "level": bins.level(b), "count": bins.counts[b]})).collect::<Vec<_>>(),
    }));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            preset,
            data_dir,
            out,
            format,
            replications,
        } => run(config, preset, &data_dir, out, &format, replications),
        Command::Hardness {
            data,
            label,
            k,
            raw,
            out,
        } => hardness(&data, &label, k, raw, out),
        Command::Config { preset, data_dir } => preset_config(preset, &data_dir)
            .to_toml_string()
            .map(|text| print!("{text}")),
        Command::Compare { a, b } => ExperimentReport::load(&a)
            .and_then(|ra| Ok((ra, ExperimentReport::load(&b)?)))
            .and_then(|(ra, rb)| compare_reports(&ra, &rb))
            .map(|tests| print_json(&serde_json::to_value(tests).unwrap_or_default())),
        Command::Generate {
            kind,
            n,
            noise,
            seed,
            out,
        } => generate_synthetic(kind, n, noise, seed).and_then(|ds| write_csv(&ds, &out)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({"kind": e.kind(), "message": e.to_string()}));
            ExitCode::FAILURE
        }
    }
}
