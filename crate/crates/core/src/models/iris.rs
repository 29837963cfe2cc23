//! Iris ingestion: standard UCI comma-separated format, 150 rows, 50 per
//! class. A copy ships with the crate; `IRIS_PATH` or an explicit path
//! overrides it.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const BUNDLED_IRIS: &str = include_str!("../../data/iris.csv");

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("expected 150 rows with 50 per class, got {0}")]
    BadComposition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrisClass {
    Setosa,
    Versicolor,
    Virginica,
}

impl IrisClass {
    pub const ALL: [IrisClass; 3] = [IrisClass::Setosa, IrisClass::Versicolor, IrisClass::Virginica];

    fn from_label(s: &str) -> Option<Self> {
        match s {
            "Iris-setosa" => Some(IrisClass::Setosa),
            "Iris-versicolor" => Some(IrisClass::Versicolor),
            "Iris-virginica" => Some(IrisClass::Virginica),
            _ => None,
        }
    }
}

impl fmt::Display for IrisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IrisClass::Setosa => "setosa",
            IrisClass::Versicolor => "versicolor",
            IrisClass::Virginica => "virginica",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct IrisRow {
    pub features: [f64; 4],
    pub label: IrisClass,
}

#[derive(Debug, Clone)]
pub struct IrisDataset {
    pub rows: Vec<IrisRow>,
}

impl IrisDataset {
    /// One-vs-rest 0/1 labels for a class.
    pub fn binary_labels(&self, class: IrisClass) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| if r.label == class { 1.0 } else { 0.0 })
            .collect()
    }
}

/// Parse the UCI format: four floats and a label per line. Features are used
/// raw, without standardization.
pub fn parse_iris(text: &str) -> Result<IrisDataset, DataError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parts: Vec<&str> = trimmed.split(',').collect();
        if parts.len() != 5 {
            return Err(DataError::Parse {
                line,
                reason: format!("expected 5 comma-separated fields, got {}", parts.len()),
            });
        }
        let mut features = [0.0f64; 4];
        for (i, part) in parts[..4].iter().enumerate() {
            features[i] = part.trim().parse().map_err(|_| DataError::Parse {
                line,
                reason: format!("field {} is not a number: {part:?}", i + 1),
            })?;
        }
        let label = IrisClass::from_label(parts[4].trim()).ok_or_else(|| DataError::Parse {
            line,
            reason: format!("unknown class label {:?}", parts[4]),
        })?;
        rows.push(IrisRow { features, label });
    }

    if rows.len() != 150 {
        return Err(DataError::BadComposition(format!("{} rows", rows.len())));
    }
    for class in IrisClass::ALL {
        let n = rows.iter().filter(|r| r.label == class).count();
        if n != 50 {
            return Err(DataError::BadComposition(format!("{n} rows of {class}")));
        }
    }
    Ok(IrisDataset { rows })
}

/// Load the dataset: explicit path wins, then the `IRIS_PATH` environment
/// variable, then the bundled copy.
pub fn load_iris(path: Option<&Path>) -> Result<IrisDataset, DataError> {
    let from_file = |p: PathBuf| -> Result<IrisDataset, DataError> {
        let text = std::fs::read_to_string(&p).map_err(|source| DataError::Io { path: p, source })?;
        parse_iris(&text)
    };
    match path {
        Some(p) => from_file(p.to_path_buf()),
        None => match std::env::var_os("IRIS_PATH") {
            Some(p) => from_file(PathBuf::from(p)),
            None => parse_iris(BUNDLED_IRIS),
        },
    }
}
