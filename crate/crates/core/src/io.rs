//! CSV ingestion and emission, plus schema-versioned JSON sidecars.
//!
//! Datasets are CSV files with a header row. When every feature value is a
//! non-negative integer the features are read as categorical levels
//! (0/1/2 additive genotype coding, for example) with default scores;
//! otherwise all features are read as a numeric matrix.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{CategoricalDesign, Design, Level, NumericMatrix, ResponseVector, ScreenResult};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseMode {
    /// Binary when every value is 0 or 1, continuous otherwise.
    #[default]
    Auto,
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub feature_names: Vec<String>,
    pub response_name: String,
    pub design: Design<f64>,
    pub response: ResponseVector<f64>,
}

fn parse_error(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Reads a dataset from CSV text. Row numbers in errors count the header
/// as row 1.
pub fn read_dataset<R: Read>(reader: R, response_col: &str, mode: ResponseMode) -> Result<LoadedDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let resp_idx = headers
        .iter()
        .position(|h| h == response_col)
        .ok_or_else(|| parse_error(1, response_col, "unknown response column"))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != resp_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let width = headers.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width];
    for (r, record) in rdr.records().enumerate() {
        let row = r + 2;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => parse_error(
                row,
                "-",
                format!("expected {expected_len} fields, found {len}"),
            ),
            _ => Error::Csv(e),
        })?;
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_error(row, &headers[c], format!("`{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(row, &headers[c], "value is not finite"));
            }
            columns[c].push(v);
        }
    }
    let response_values = columns.remove(resp_idx);
    if response_values.is_empty() {
        return Err(Error::NoObservations);
    }

    let is_binary = response_values.iter().all(|&v| v == 0.0 || v == 1.0);
    let response = match mode {
        ResponseMode::Binary => {
            if let Some(i) = response_values.iter().position(|&v| v != 0.0 && v != 1.0) {
                return Err(parse_error(i + 2, response_col, "binary response must be 0 or 1"));
            }
            ResponseVector::binary_from_values(response_values)?
        }
        ResponseMode::Auto if is_binary => ResponseVector::binary_from_values(response_values)?,
        _ => ResponseVector::continuous(response_values)?,
    };

    let categorical = columns.iter().all(|c| {
        c.iter()
            .all(|&v| v >= 0.0 && v.fract() == 0.0 && v <= f64::from(Level::MAX) - 1.0)
    });
    let n = response.len();
    let design = if categorical {
        let levels: Vec<Vec<Level>> = columns
            .iter()
            .map(|c| c.iter().map(|&v| v as Level).collect())
            .collect();
        let counts: Vec<usize> = levels
            .iter()
            .map(|c| c.iter().copied().max().map_or(1, |m| usize::from(m) + 1))
            .collect();
        Design::Categorical(CategoricalDesign::with_default_scores(n, levels, &counts)?)
    } else if columns.is_empty() {
        Design::Numeric(NumericMatrix::from_columns(Vec::new())?)
    } else {
        Design::Numeric(NumericMatrix::from_columns(columns)?)
    };
    Ok(LoadedDataset {
        feature_names,
        response_name: response_col.to_string(),
        design,
        response,
    })
}

pub fn load_dataset(path: &Path, response_col: &str, mode: ResponseMode) -> Result<LoadedDataset> {
    read_dataset(BufReader::new(File::open(path)?), response_col, mode)
}

/// Writes features followed by the response column.
pub fn write_dataset<W: Write>(writer: W, data: &LoadedDataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = data.feature_names.clone();
    header.push(data.response_name.clone());
    w.write_record(&header)?;
    let p = data.design.p();
    let binary = data.response.is_binary();
    for i in 0..data.response.len() {
        let mut rec: Vec<String> = Vec::with_capacity(p + 1);
        match &data.design {
            Design::Categorical(d) => rec.extend((0..p).map(|j| d.level(i, j).to_string())),
            Design::Numeric(m) => rec.extend((0..p).map(|j| m.get(i, j).to_string())),
        }
        let v = data.response.values()[i];
        rec.push(if binary {
            (v as u8).to_string()
        } else {
            v.to_string()
        });
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(path: &Path, data: &LoadedDataset) -> Result<()> {
    write_dataset(BufWriter::new(File::create(path)?), data)
}

/// Default names `X1..Xp`.
pub fn default_feature_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("X{j}")).collect()
}

/// Ranked CSV with columns `feature,score,rank`, sorted by rank.
pub fn write_ranking<W: Write>(writer: W, result: &ScreenResult<f64>, names: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["feature", "score", "rank"])?;
    for (pos, &j) in result.ranking.iter().enumerate() {
        let name = names.get(j).cloned().unwrap_or_else(|| format!("X{}", j + 1));
        w.write_record([name, result.scores[j].to_string(), (pos + 1).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Run provenance attached to every output artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Fully resolved configuration of the run.
    pub config: serde_json::Value,
    pub wall_clock_secs: f64,
}

impl Provenance {
    pub fn new(command: &str, seed: u64, config: serde_json::Value, wall_clock_secs: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "catsis".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config,
            wall_clock_secs,
        }
    }
}

/// A JSON document pairing provenance with a payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar<T> {
    pub provenance: Provenance,
    pub payload: T,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
