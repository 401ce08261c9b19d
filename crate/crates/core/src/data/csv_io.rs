use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl Default for LabelColumn {
    fn default() -> Self {
        LabelColumn::Name("class".into())
    }
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub dataset: Dataset,
    /// Rows dropped because a feature or the label was missing or non-finite.
    pub rejected_rows: usize,
}

enum Cell {
    Number(f64),
    Missing,
    Text,
}

fn classify(raw: &str) -> Cell {
    let s = raw.trim();
    if s.is_empty() || s == "?" || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("null") {
        return Cell::Missing;
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Cell::Number(v),
        Ok(_) => Cell::Missing,
        Err(_) => Cell::Text,
    }
}

/// Reads a comma-separated file into a [`Dataset`].
///
/// Labels are re-encoded densely in order of first appearance. A header row
/// is required when the label column is given by name; with an index it is
/// detected as a first row whose feature cells are all non-numeric.
pub fn ingest_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<Ingested> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records: Vec<csv::StringRecord> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        records.push(rec);
    }
    let Some(first) = records.first() else {
        return Err(Error::Empty(format!("{} contains no rows", path.display())));
    };
    let width = first.len();

    let (label_idx, has_header) = match label {
        LabelColumn::Name(n) => {
            let idx = first
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| Error::MissingColumn(n.clone()))?;
            (idx, true)
        }
        LabelColumn::Index(i) => {
            if *i >= width {
                return Err(Error::MissingColumn(i.to_string()));
            }
            let header = width > 1
                && first
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j != i)
                    .all(|(_, v)| matches!(classify(v), Cell::Text));
            (*i, header)
        }
    };
    let column_names: Vec<String> = if has_header {
        first.iter().map(str::to_string).collect()
    } else {
        (0..width).map(|j| format!("column {j}")).collect()
    };
    let body = if has_header {
        &records[1..]
    } else {
        &records[..]
    };
    if body.is_empty() {
        return Err(Error::Empty(format!(
            "{} has a header but no data",
            path.display()
        )));
    }
    if width < 2 {
        return Err(Error::InvalidDataset(
            "need at least one feature column".into(),
        ));
    }

    let line_offset = if has_header { 2 } else { 1 };
    let mut features = Vec::with_capacity(body.len() * (width - 1));
    let mut raw_labels = Vec::with_capacity(body.len());
    let mut rejected = 0;
    for (r, rec) in body.iter().enumerate() {
        let mut row = Vec::with_capacity(width - 1);
        let mut missing = false;
        for (j, cell) in rec.iter().enumerate() {
            if j == label_idx {
                continue;
            }
            match classify(cell) {
                Cell::Number(v) => row.push(v),
                Cell::Missing => missing = true,
                Cell::Text => {
                    return Err(Error::NonNumericColumn {
                        column: column_names[j].clone(),
                        value: cell.to_string(),
                        line: r + line_offset,
                    })
                }
            }
        }
        let label_cell = rec[label_idx].trim();
        if missing || label_cell.is_empty() {
            rejected += 1;
            continue;
        }
        features.extend(row);
        raw_labels.push(label_cell.to_string());
    }
    if raw_labels.is_empty() {
        return Err(Error::Empty(format!(
            "{}: every row was rejected",
            path.display()
        )));
    }

    let mut codes: HashMap<&str, usize> = HashMap::new();
    let mut class_names = Vec::new();
    let labels: Vec<usize> = raw_labels
        .iter()
        .map(|l| {
            *codes.entry(l.as_str()).or_insert_with(|| {
                class_names.push(l.clone());
                class_names.len() - 1
            })
        })
        .collect();
    if class_names.len() < 2 {
        return Err(Error::SingleClass);
    }

    let dataset = Dataset::from_flat(name, width - 1, features, labels, class_names.len())?
        .with_class_names(class_names)?;
    Ok(Ingested {
        dataset,
        rejected_rows: rejected,
    })
}

/// Writes `ds` with a header row; the label goes last, in a column named `class`.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Csv(e.to_string()))?;
    let mut header: Vec<String> = (0..ds.n_features()).map(|j| format!("x{j}")).collect();
    header.push("class".into());
    w.write_record(&header)
        .map_err(|e| Error::Csv(e.to_string()))?;
    for (row, &label) in ds.rows().zip(ds.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(ds.class_names()[label].clone());
        w.write_record(&rec)
            .map_err(|e| Error::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
