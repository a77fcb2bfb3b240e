use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::sweep::SweepConfig;
use crate::error::{Error, Result};
use crate::factorizer::VariantKind;

/// Accuracy a size must reach to count towards operational capacity.
pub const CAPACITY_ACCURACY: f64 = 0.99;

pub const CSV_HEADER: [&str; 16] = [
    "variant",
    "F",
    "M",
    "D",
    "search_space",
    "trials",
    "accuracy",
    "ci_low",
    "ci_high",
    "mean_iterations",
    "sigma",
    "flip_rate",
    "activation_threshold",
    "convergence_threshold",
    "max_iters",
    "preset_exact",
];

/// Whether a row's hyperparameters came from an exact preset row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresetMatch {
    #[serde(rename = "true")]
    Exact,
    #[serde(rename = "false")]
    Nearest,
    /// Nothing was taken from the preset table.
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl PresetMatch {
    pub fn from_exact(exact: bool) -> Self {
        if exact {
            Self::Exact
        } else {
            Self::Nearest
        }
    }
}

/// Rounds to 6 significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn ser_sig6<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig6(*x))
}

fn ser_sig6_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round_sig6(*v)),
        None => s.serialize_none(),
    }
}

fn de_opt_f64<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    // CSV leaves unused parameters empty; JSON writes null.
    let raw: Option<serde_json::Value> = Option::deserialize(d)?;
    match raw {
        None | Some(serde_json::Value::Null) => Ok(None),
        Some(serde_json::Value::Number(n)) => Ok(n.as_f64()),
        Some(serde_json::Value::String(s)) if s.is_empty() => Ok(None),
        Some(serde_json::Value::String(s)) => s.parse().map(Some).map_err(serde::de::Error::custom),
        Some(other) => Err(serde::de::Error::custom(format!(
            "expected a number, got {other}"
        ))),
    }
}

/// One swept search-space size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub variant: VariantKind,
    #[serde(rename = "F")]
    pub factors: usize,
    #[serde(rename = "M")]
    pub codebook_size: usize,
    #[serde(rename = "D")]
    pub dim: usize,
    pub search_space: u64,
    pub trials: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub accuracy: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub ci_low: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub ci_high: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub mean_iterations: f64,
    #[serde(
        serialize_with = "ser_sig6_opt",
        deserialize_with = "de_opt_f64",
        default
    )]
    pub sigma: Option<f64>,
    #[serde(
        serialize_with = "ser_sig6_opt",
        deserialize_with = "de_opt_f64",
        default
    )]
    pub flip_rate: Option<f64>,
    #[serde(
        serialize_with = "ser_sig6_opt",
        deserialize_with = "de_opt_f64",
        default
    )]
    pub activation_threshold: Option<f64>,
    #[serde(serialize_with = "ser_sig6")]
    pub convergence_threshold: f64,
    pub max_iters: usize,
    pub preset_exact: PresetMatch,
}

/// Largest search space whose accuracy reaches 0.99, if any.
pub fn operational_capacity(rows: &[CapacityRow]) -> Option<u64> {
    rows.iter()
        .filter(|r| r.accuracy >= CAPACITY_ACCURACY)
        .map(|r| r.search_space)
        .max()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::invalid(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityReport {
    pub config: SweepConfig,
    pub rows: Vec<CapacityRow>,
    pub operational_capacity: Option<u64>,
}

impl CapacityReport {
    pub fn new(config: SweepConfig, rows: Vec<CapacityRow>) -> Self {
        let operational_capacity = operational_capacity(&rows);
        Self {
            config,
            rows,
            operational_capacity,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        rows_to_csv(&self.rows)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidState(format!("cannot serialize report: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        }
    }
}

pub fn rows_to_csv(rows: &[CapacityRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    let bad = |e: csv::Error| Error::InvalidState(format!("cannot write CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(bad)?;
    for row in rows {
        w.serialize(row).map_err(bad)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidState(format!("cannot write CSV: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidState(e.to_string()))
}

/// Parses rows back from CSV emitted by [`rows_to_csv`].
pub fn rows_from_csv<R: Read>(reader: R, origin: &Path) -> Result<Vec<CapacityRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers().map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    if headers.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            path: origin.to_path_buf(),
            message: format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()),
        });
    }
    r.deserialize()
        .map(|row| {
            row.map_err(|e| Error::Parse {
                path: origin.to_path_buf(),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Writes `contents` to `dest` through a temporary file in the same
/// directory, so readers never see a partial report.
pub fn write_atomic(dest: &Path, contents: &[u8]) -> Result<()> {
    let dir = match dest.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dest, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(dest, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(dest, e))?;
    tmp.persist(dest).map_err(|e| Error::io(dest, e.error))?;
    Ok(())
}

pub fn emit_report(report: &CapacityReport, format: ReportFormat, dest: &Path) -> Result<()> {
    write_atomic(dest, report.render(format)?.as_bytes())
}
