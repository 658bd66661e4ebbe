//! CSV and JSON matrix documents.
//!
//! CSV is positional: one row per line, no header, no labels. Lines starting
//! with `#` are ignored. Cells are decimal numbers or simple fractions such
//! as `1/3`.
//!
//! JSON carries optional labels and metadata:
//!
//! ```json
//! {"labels": ["A", "B", "C"], "matrix": [[1, 2, 5], [0.5, 1, 3], [0.2, 0.3333333333, 1]]}
//! ```
//!
//! Values are written in shortest round-trip form, which never needs more
//! than 17 significant digits, so `parse(serialize(doc)) == doc`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Result as PcResult;
use crate::matrix::PcMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: u64,
        message: String,
    },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("invalid labels: {0}")]
    Labels(String),
    #[error("unknown format {0:?}, expected csv or json")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, FormatError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(FormatError::UnknownFormat(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MatrixDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl MatrixDocument {
    pub fn new(matrix: Vec<Vec<f64>>) -> Self {
        Self {
            matrix,
            ..Self::default()
        }
    }

    pub fn from_pc_matrix(m: &PcMatrix, labels: Option<Vec<String>>) -> Self {
        Self {
            labels,
            matrix: m.to_rows(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    /// Supplied labels, or `A`, `B`, `C`, ... when absent.
    pub fn labels_or_default(&self) -> Vec<String> {
        self.labels.clone().unwrap_or_else(|| default_labels(self.n()))
    }

    pub fn to_pc_matrix(&self, recip_tol: f64) -> PcResult<PcMatrix> {
        PcMatrix::new(&self.matrix, recip_tol)
    }

    /// Squareness and label checks. Numeric validation is left to
    /// [`PcMatrix::new`].
    pub fn check(&self) -> Result<(), FormatError> {
        let n = self.n();
        if n == 0 {
            return Err(FormatError::Dimension("matrix is empty".into()));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(FormatError::Dimension(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
        }
        if let Some(labels) = &self.labels {
            check_labels(labels, n)?;
        }
        Ok(())
    }
}

pub fn check_labels(labels: &[String], n: usize) -> Result<(), FormatError> {
    if labels.len() != n {
        return Err(FormatError::Labels(format!(
            "{} labels for {n} entities",
            labels.len()
        )));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(FormatError::Labels(format!("duplicate label {l:?}")));
        }
    }
    Ok(())
}

/// `A`..`Z`, then `E27`, `E28`, ...
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                char::from(b'A' + i as u8).to_string()
            } else {
                format!("E{}", i + 1)
            }
        })
        .collect()
}

pub fn parse(input: &str, format: Format) -> Result<MatrixDocument, FormatError> {
    let doc = match format {
        Format::Csv => parse_csv(input)?,
        Format::Json => serde_json::from_str::<MatrixDocument>(input).map_err(|e| {
            FormatError::Parse {
                line: e.line() as u64,
                column: e.column() as u64,
                message: e.to_string(),
            }
        })?,
    };
    doc.check()?;
    Ok(doc)
}

fn parse_csv(input: &str) -> Result<MatrixDocument, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            FormatError::Parse {
                line,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if let Some(width) = rows.first().map(Vec::len) {
            if record.len() != width {
                return Err(FormatError::Parse {
                    line,
                    column: (record.len().min(width) + 1) as u64,
                    message: format!(
                        "row {} has {} fields, expected {width}",
                        rows.len() + 1,
                        record.len()
                    ),
                });
            }
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                parse_value(field).ok_or_else(|| FormatError::Parse {
                    line,
                    column: col as u64 + 1,
                    message: format!("cannot read {field:?} as a number"),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(MatrixDocument::new(rows))
}

fn parse_value(field: &str) -> Option<f64> {
    if let Some((num, den)) = field.split_once('/') {
        let num: f64 = num.trim().parse().ok()?;
        let den: f64 = den.trim().parse().ok()?;
        return Some(num / den);
    }
    field.parse().ok()
}

pub fn serialize(doc: &MatrixDocument, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            for row in &doc.matrix {
                let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
            out
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
            s.push('\n');
            s
        }
    }
}
