//! Merges a JSON config file with command-line overrides into the library's
//! configuration types. Keys are the report's column names; flags are their
//! kebab-case spellings.

use std::fs;
use std::path::Path;

use resonator::bench::{PresetTable, SweepConfig};
use serde_json::{Map, Value};

use crate::args::{ModelArgs, SweepArgs, VariantArg};
use crate::Failure;

pub type Document = Map<String, Value>;

pub fn load_document(path: Option<&Path>) -> Result<Document, Failure> {
    let Some(path) = path else {
        return Ok(Document::new());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Failure::Usage(format!(
            "{}: config must be a JSON object",
            path.display()
        ))),
        Err(e) => Err(Failure::Usage(format!("{}: {e}", path.display()))),
    }
}

fn set<T: Into<Value>>(doc: &mut Document, key: &str, value: Option<T>) {
    if let Some(v) = value {
        doc.insert(key.to_owned(), v.into());
    }
}

pub fn variant_name(v: VariantArg) -> &'static str {
    match v {
        VariantArg::Brn => "brn",
        VariantArg::Imf => "imf",
        VariantArg::Acf => "acf",
    }
}

/// Applies the factorizer flags on top of `doc`.
pub fn apply_model(doc: &mut Document, m: &ModelArgs) {
    set(doc, "variant", m.variant.map(variant_name));
    set(doc, "F", m.factors);
    set(doc, "D", m.dim);
    set(doc, "sigma", m.sigma);
    set(doc, "flip_rate", m.flip_rate);
    set(doc, "activation_threshold", m.activation_threshold);
    set(doc, "convergence_threshold", m.convergence_threshold);
    set(
        doc,
        "convergence_mode",
        m.convergence_mode.as_deref().map(str::to_ascii_lowercase),
    );
    set(
        doc,
        "schedule",
        m.schedule.as_deref().map(str::to_ascii_lowercase),
    );
    set(doc, "max_iters", m.max_iters);
    set(doc, "seed", m.seed);
    set(
        doc,
        "preset",
        m.preset.as_deref().map(str::to_ascii_lowercase),
    );
    set(
        doc,
        "precision",
        m.precision.as_deref().map(str::to_ascii_lowercase),
    );
}

pub fn apply_sweep(doc: &mut Document, a: &SweepArgs) {
    apply_model(doc, &a.model);
    set(doc, "search_space_sizes", a.search_space_sizes.clone());
    set(doc, "trials", a.trials);
    set(doc, "parallelism", a.parallelism);
}

pub fn to_sweep_config(doc: Document) -> Result<SweepConfig, Failure> {
    let cfg: SweepConfig = serde_json::from_value(Value::Object(doc))
        .map_err(|e| Failure::Usage(format!("invalid configuration: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Splits a single-instance document into a one-size sweep and the codebook
/// size `M`, which the sweep form expresses as `M^F`.
pub fn single_instance(
    mut doc: Document,
    m_flag: Option<usize>,
) -> Result<(SweepConfig, usize), Failure> {
    let from_doc = doc.remove("M").map(|v| {
        v.as_u64()
            .map(|m| m as usize)
            .ok_or_else(|| Failure::Usage(format!("M must be a positive integer, got {v}")))
    });
    let m = match (m_flag, from_doc) {
        (Some(m), _) => m,
        (None, Some(m)) => m?,
        (None, None) => return Err(Failure::Usage("missing codebook size (-M)".into())),
    };
    let factors = doc
        .get("F")
        .and_then(Value::as_u64)
        .ok_or_else(|| Failure::Usage("missing factor count (-F)".into()))?;
    if m < 2 {
        return Err(Failure::Usage(format!(
            "codebook size must be at least 2, got {m}"
        )));
    }
    let size = (m as u64)
        .checked_pow(factors as u32)
        .ok_or_else(|| Failure::Usage(format!("{m}^{factors} overflows")))?;
    doc.insert("search_space_sizes".into(), vec![size].into());
    doc.entry("trials").or_insert(1.into());
    Ok((to_sweep_config(doc)?, m))
}

pub fn preset_table(path: Option<&Path>) -> Result<PresetTable, Failure> {
    Ok(PresetTable::resolve(path)?)
}
