//! Tuned hyperparameter presets keyed by (factors, search-space size).
//!
//! The default table is compiled in from `data/presets.txt`; a replacement
//! file with the same record format can be loaded at runtime.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorizer::{Activation, VariantKind, VariantSpec};

pub const EMBEDDED_PRESETS: &str = include_str!("../../data/presets.txt");

/// Environment variable naming a preset file that replaces the embedded one.
pub const PRESETS_ENV: &str = "RESONATOR_PRESETS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresetRow {
    pub factors: usize,
    pub search_space: u64,
    pub dim: usize,
    pub flip_rate: f64,
    pub acf_threshold: f64,
    pub sigma: f64,
    pub imf_threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PresetTable {
    rows: Vec<PresetRow>,
}

/// Hyperparameters resolved from a table row.
#[derive(Clone, Debug, PartialEq)]
pub struct PresetLookup {
    pub dim: usize,
    pub spec: VariantSpec,
    /// Size of the row that was used.
    pub search_space: u64,
    /// False when the nearest row (on a log scale) stood in for a missing one.
    pub exact: bool,
}

fn parse_size(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let v = s.parse::<f64>().ok()?;
    (v.is_finite() && v >= 1.0).then(|| v.round() as u64)
}

impl PresetTable {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_PRESETS, Path::new("<embedded presets>"))
            .expect("embedded preset table is well formed")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Loads `path` if given, else the file named by [`PRESETS_ENV`], else
    /// the embedded table.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        if let Some(p) = path {
            return Self::load(p);
        }
        match std::env::var_os(PRESETS_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::embedded()),
        }
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                message: format!("line {}: {message}", lineno + 1),
            };
            let mut row = PresetRow {
                factors: 0,
                search_space: 0,
                dim: 0,
                flip_rate: f64::NAN,
                acf_threshold: f64::NAN,
                sigma: f64::NAN,
                imf_threshold: f64::NAN,
            };
            let mut seen = 0u8;
            for field in line.split_whitespace() {
                let (key, value) = field
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected key=value, got {field:?}")))?;
                let bad = || err(format!("bad value for {key}: {value:?}"));
                let num = || value.parse::<f64>().map_err(|_| bad());
                let bit = match key {
                    "factors" => {
                        row.factors = value.parse().map_err(|_| bad())?;
                        0
                    }
                    "search_space" => {
                        row.search_space = parse_size(value).ok_or_else(bad)?;
                        1
                    }
                    "dim" => {
                        row.dim = value.parse().map_err(|_| bad())?;
                        2
                    }
                    "flip_rate" => {
                        row.flip_rate = num()?;
                        3
                    }
                    "acf_threshold" => {
                        row.acf_threshold = num()?;
                        4
                    }
                    "sigma" => {
                        row.sigma = num()?;
                        5
                    }
                    "imf_threshold" => {
                        row.imf_threshold = num()?;
                        6
                    }
                    other => return Err(err(format!("unknown field {other:?}"))),
                };
                seen |= 1 << bit;
            }
            if seen != 0x7f {
                return Err(err("record is missing fields".into()));
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[PresetRow] {
        &self.rows
    }

    /// Row for `(factors, search_space)`: the exact row if present, otherwise
    /// the row of the same factor count nearest in `log(search_space)`.
    pub fn row(&self, factors: usize, search_space: u64) -> Result<(&PresetRow, bool)> {
        let candidates = self.rows.iter().filter(|r| r.factors == factors);
        if let Some(r) = self
            .rows
            .iter()
            .find(|r| r.factors == factors && r.search_space == search_space)
        {
            return Ok((r, true));
        }
        let target = (search_space.max(1) as f64).ln();
        candidates
            .min_by(|a, b| {
                let da = ((a.search_space as f64).ln() - target).abs();
                let db = ((b.search_space as f64).ln() - target).abs();
                da.total_cmp(&db)
            })
            .map(|r| (r, false))
            .ok_or_else(|| {
                Error::Config(format!(
                    "no preset for factors={factors} (key factors={factors}, search_space={search_space})"
                ))
            })
    }

    pub fn lookup(
        &self,
        factors: usize,
        search_space: u64,
        kind: VariantKind,
    ) -> Result<PresetLookup> {
        let (row, exact) = self.row(factors, search_space)?;
        let spec = match kind {
            VariantKind::Brn => VariantSpec::brn(),
            VariantKind::Imf => VariantSpec::imf(row.sigma, row.imf_threshold),
            VariantKind::Acf => VariantSpec::acf(row.flip_rate, row.acf_threshold),
        };
        Ok(PresetLookup {
            dim: row.dim,
            spec,
            search_space: row.search_space,
            exact,
        })
    }
}

/// Looks up the embedded table. Only factor counts 2, 3 and 4 are tabulated.
pub fn lookup_preset(factors: usize, search_space: u64, kind: VariantKind) -> Result<PresetLookup> {
    if !(2..=4).contains(&factors) {
        return Err(Error::Config(format!(
            "presets cover factors 2, 3 and 4, not {factors}"
        )));
    }
    PresetTable::embedded().lookup(factors, search_space, kind)
}

impl PresetLookup {
    pub fn activation_threshold(&self) -> Option<f64> {
        match self.spec.activation {
            Activation::Threshold { t } => Some(t),
            Activation::Identity => None,
        }
    }
}
