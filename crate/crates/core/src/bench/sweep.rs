use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::presets::{PresetLookup, PresetTable};
use super::report::{CapacityReport, CapacityRow, PresetMatch};
use super::stats::{wilson_interval, Z95};
use super::trial::{run_trial, TrialResult};
use crate::error::{Error, Result};
use crate::factorizer::{
    default_max_iters, Activation, ConvergenceMode, FactorizerConfig, Quantifier, Schedule,
    Variant, VariantKind, VariantSpec, DEFAULT_CONVERGENCE_THRESHOLD,
};
use crate::rng::derive_seed;

pub const DEFAULT_TRIALS: usize = 200;

/// Where unspecified hyperparameters come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetSource {
    /// The tuned table, for any value not given explicitly.
    #[default]
    Paper,
    /// Explicit values only.
    None,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    #[default]
    F64,
}

fn default_threshold() -> f64 {
    DEFAULT_CONVERGENCE_THRESHOLD
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn one() -> usize {
    1
}

/// A capacity sweep. Field names double as the keys of the JSON config file
/// and match the report's CSV columns where they overlap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variant: VariantKind,
    #[serde(rename = "F")]
    pub factors: usize,
    #[serde(rename = "D", default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub flip_rate: Option<f64>,
    #[serde(default)]
    pub activation_threshold: Option<f64>,
    #[serde(default = "default_threshold")]
    pub convergence_threshold: f64,
    #[serde(default)]
    pub convergence_mode: ConvergenceMode,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub max_iters: Option<usize>,
    /// Target search-space sizes; each is realized as `M^F` with
    /// `M = round(target^(1/F))`.
    pub search_space_sizes: Vec<u64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub preset: PresetSource,
    #[serde(default)]
    pub precision: Precision,
    /// Worker threads. Results do not depend on it, so it is left out of
    /// serialized reports.
    #[serde(default = "one", skip_serializing)]
    pub parallelism: usize,
}

impl SweepConfig {
    pub fn new(variant: VariantKind, factors: usize, sizes: Vec<u64>) -> Self {
        Self {
            variant,
            factors,
            dim: None,
            sigma: None,
            flip_rate: None,
            activation_threshold: None,
            convergence_threshold: DEFAULT_CONVERGENCE_THRESHOLD,
            convergence_mode: ConvergenceMode::default(),
            schedule: Schedule::default(),
            max_iters: None,
            search_space_sizes: sizes,
            trials: DEFAULT_TRIALS,
            seed: 0,
            preset: PresetSource::default(),
            precision: Precision::default(),
            parallelism: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.parallelism == 0 {
            return Err(Error::invalid("parallelism must be at least 1"));
        }
        if self.factors < 2 {
            return Err(Error::invalid(format!(
                "at least 2 factors required, got {}",
                self.factors
            )));
        }
        if self.search_space_sizes.is_empty() {
            return Err(Error::invalid("no search-space sizes to sweep"));
        }
        if self.dim == Some(0) {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if self.max_iters == Some(0) {
            return Err(Error::invalid("max-iters must be at least 1"));
        }
        for &target in &self.search_space_sizes {
            codebook_size_for(target, self.factors)?;
        }
        Ok(())
    }

    /// Factorizer template and preset status for one target size.
    pub fn resolve(&self, target: u64, table: &PresetTable) -> Result<ResolvedSize> {
        let codebook_size = codebook_size_for(target, self.factors)?;
        let search_space = realized_size(codebook_size, self.factors)?;
        let kind = self.variant;

        let needs_table = self.dim.is_none()
            || match kind {
                VariantKind::Brn => false,
                VariantKind::Imf => self.sigma.is_none() || self.activation_threshold.is_none(),
                VariantKind::Acf => self.flip_rate.is_none() || self.activation_threshold.is_none(),
            };
        let preset: Option<PresetLookup> = match (needs_table, self.preset) {
            (true, PresetSource::Paper) => {
                if !(2..=4).contains(&self.factors) {
                    return Err(Error::Config(format!(
                        "presets cover F = 2, 3 and 4; give explicit values for F = {}",
                        self.factors
                    )));
                }
                Some(table.lookup(self.factors, search_space, kind)?)
            }
            _ => None,
        };
        let missing = |key: &str| {
            Error::Config(format!(
                "missing key {key} for variant {kind} (F={}, search_space={search_space}) and no preset supplies it",
                self.factors
            ))
        };
        let mut used_preset = false;
        let mut pick = |explicit: Option<f64>, from_preset: Option<f64>, key: &str| match (
            explicit,
            from_preset,
        ) {
            (Some(v), _) => Ok(v),
            (None, Some(v)) => {
                used_preset = true;
                Ok(v)
            }
            (None, None) => Err(missing(key)),
        };

        let preset_threshold = preset.as_ref().and_then(|p| p.activation_threshold());
        let spec = match kind {
            VariantKind::Brn => VariantSpec {
                variant: Variant::Brn,
                activation: match self.activation_threshold {
                    Some(t) => Activation::Threshold { t },
                    None => Activation::Identity,
                },
            },
            VariantKind::Imf => {
                let sigma = pick(
                    self.sigma,
                    preset.as_ref().and_then(|p| p.spec.variant.sigma()),
                    "sigma",
                )?;
                let t = pick(
                    self.activation_threshold,
                    preset_threshold,
                    "activation_threshold",
                )?;
                VariantSpec::imf(sigma, t)
            }
            VariantKind::Acf => {
                let r = pick(
                    self.flip_rate,
                    preset.as_ref().and_then(|p| p.spec.variant.flip_rate()),
                    "flip_rate",
                )?;
                let t = pick(
                    self.activation_threshold,
                    preset_threshold,
                    "activation_threshold",
                )?;
                VariantSpec::acf(r, t)
            }
        };
        let dim = match (self.dim, &preset) {
            (Some(d), _) => d,
            (None, Some(p)) => {
                used_preset = true;
                p.dim
            }
            (None, None) => return Err(missing("D")),
        };

        let preset_match = match &preset {
            Some(p) if used_preset => {
                if !p.exact {
                    log::warn!(
                        "no preset row for F={} search_space={search_space}; using nearest row {}",
                        self.factors,
                        p.search_space
                    );
                }
                PresetMatch::from_exact(p.exact)
            }
            _ => PresetMatch::NotApplicable,
        };

        let mut template = FactorizerConfig::new(spec, self.factors, codebook_size, dim, 0);
        template.max_iters = self
            .max_iters
            .unwrap_or_else(|| default_max_iters(codebook_size, self.factors));
        template.convergence_threshold = self.convergence_threshold;
        template.convergence_mode = self.convergence_mode;
        template.quantifier = Quantifier::All;
        template.schedule = self.schedule;
        template.validate()?;
        Ok(ResolvedSize {
            template,
            search_space,
            preset: preset_match,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ResolvedSize {
    pub template: FactorizerConfig,
    pub search_space: u64,
    pub preset: PresetMatch,
}

/// `round(target^(1/F))`, corrected for floating-point error in the root.
pub fn codebook_size_for(target: u64, factors: usize) -> Result<usize> {
    if factors == 0 {
        return Err(Error::invalid("factors must be positive"));
    }
    let root = (target as f64).powf(1.0 / factors as f64);
    let mut m = root.round() as u64;
    // The nearest integer root is whichever neighbour of the float root
    // gives the smallest |m^F - target| on the root scale.
    let dist = |m: u64| ((m as f64) - root).abs();
    for cand in [m.saturating_sub(1), m + 1] {
        if cand >= 1 && dist(cand) < dist(m) {
            m = cand;
        }
    }
    if m < 2 {
        return Err(Error::invalid(format!(
            "search space {target} gives codebook size {m} for F={factors}; need at least 2"
        )));
    }
    Ok(m as usize)
}

pub fn realized_size(codebook_size: usize, factors: usize) -> Result<u64> {
    (codebook_size as u64)
        .checked_pow(factors as u32)
        .ok_or_else(|| Error::invalid(format!("{codebook_size}^{factors} overflows")))
}

/// Seed of trial `trial` at sweep position `size_index`.
pub fn trial_seed(master: u64, size_index: usize, trial: usize) -> u64 {
    derive_seed(master, &[size_index as u64, trial as u64])
}

/// Runs trials `0..count` of one sweep position, in parallel on `pool`.
/// Results are in trial order whatever the thread count.
pub fn run_trials(
    template: &FactorizerConfig,
    master_seed: u64,
    size_index: usize,
    count: usize,
    precision: Precision,
    pool: &rayon::ThreadPool,
) -> Result<Vec<TrialResult>> {
    pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(master_seed, size_index, t);
                match precision {
                    Precision::F32 => run_trial::<f32>(seed, template),
                    Precision::F64 => run_trial::<f64>(seed, template),
                }
            })
            .collect()
    })
}

pub fn build_pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))
}

/// Aggregates trial results into one report row.
pub fn summarize(
    resolved: &ResolvedSize,
    kind: VariantKind,
    results: &[TrialResult],
) -> CapacityRow {
    let t = &resolved.template;
    let trials = results.len();
    let correct = results.iter().filter(|r| r.correct).count();
    let total_iters: u64 = results.iter().map(|r| r.iterations as u64).sum();
    let (ci_low, ci_high) = wilson_interval(correct, trials, Z95);
    CapacityRow {
        variant: kind,
        factors: t.factors,
        codebook_size: t.codebook_size,
        dim: t.dim,
        search_space: resolved.search_space,
        trials,
        accuracy: if trials == 0 {
            0.0
        } else {
            correct as f64 / trials as f64
        },
        ci_low,
        ci_high,
        mean_iterations: if trials == 0 {
            0.0
        } else {
            total_iters as f64 / trials as f64
        },
        sigma: t.variant.variant.sigma(),
        flip_rate: t.variant.variant.flip_rate(),
        activation_threshold: t.variant.activation.threshold(),
        convergence_threshold: t.convergence_threshold,
        max_iters: t.max_iters,
        preset_exact: resolved.preset,
    }
}

pub fn run_sweep(cfg: &SweepConfig, table: &PresetTable) -> Result<CapacityReport> {
    run_sweep_with(cfg, table, |_| {})
}

/// [`run_sweep`] with a callback after each completed size.
pub fn run_sweep_with(
    cfg: &SweepConfig,
    table: &PresetTable,
    mut progress: impl FnMut(&CapacityRow),
) -> Result<CapacityReport> {
    cfg.validate()?;
    let resolved = cfg
        .search_space_sizes
        .iter()
        .map(|&target| cfg.resolve(target, table))
        .collect::<Result<Vec<_>>>()?;
    let pool = build_pool(cfg.parallelism)?;
    let mut rows = Vec::with_capacity(resolved.len());
    for (size_index, r) in resolved.iter().enumerate() {
        let results = run_trials(
            &r.template,
            cfg.seed,
            size_index,
            cfg.trials,
            cfg.precision,
            &pool,
        )?;
        let row = summarize(r, cfg.variant, &results);
        progress(&row);
        rows.push(row);
    }
    Ok(CapacityReport::new(cfg.clone(), rows))
}
