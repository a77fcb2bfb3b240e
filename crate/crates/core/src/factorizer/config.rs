use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vsa::Codebook;

/// Iteration cap applied when none is configured.
pub const MAX_ITERS_CEILING: usize = 10_000;

/// Default early-convergence threshold on the normalized similarity scale.
pub const DEFAULT_CONVERGENCE_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantKind {
    /// Baseline resonator network.
    Brn,
    /// In-memory factorizer: Gaussian noise on every attention vector.
    Imf,
    /// Asymmetric codebook factorizer: bit-flipped reconstruction codebook.
    Acf,
}

impl VariantKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VariantKind::Brn => "brn",
            VariantKind::Imf => "imf",
            VariantKind::Acf => "acf",
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "brn" => Ok(VariantKind::Brn),
            "imf" => Ok(VariantKind::Imf),
            "acf" => Ok(VariantKind::Acf),
            other => Err(Error::invalid(format!(
                "unknown variant {other:?}, expected brn, imf or acf"
            ))),
        }
    }
}

/// Variant plus its noise parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Variant {
    Brn,
    Imf { sigma: f64 },
    Acf { flip_rate: f64 },
}

impl Variant {
    pub fn kind(&self) -> VariantKind {
        match self {
            Variant::Brn => VariantKind::Brn,
            Variant::Imf { .. } => VariantKind::Imf,
            Variant::Acf { .. } => VariantKind::Acf,
        }
    }

    pub fn sigma(&self) -> Option<f64> {
        match *self {
            Variant::Imf { sigma } => Some(sigma),
            _ => None,
        }
    }

    pub fn flip_rate(&self) -> Option<f64> {
        match *self {
            Variant::Acf { flip_rate } => Some(flip_rate),
            _ => None,
        }
    }
}

/// Attention activation applied between search and reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Activation {
    /// Linear pass-through, the classic resonator.
    Identity,
    /// Keep `α[i]` only where `α[i] > T`.
    Threshold { t: f64 },
}

impl Activation {
    pub fn threshold(&self) -> Option<f64> {
        match *self {
            Activation::Threshold { t } => Some(t),
            Activation::Identity => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub variant: Variant,
    pub activation: Activation,
}

impl VariantSpec {
    pub fn brn() -> Self {
        Self {
            variant: Variant::Brn,
            activation: Activation::Identity,
        }
    }

    pub fn imf(sigma: f64, threshold: f64) -> Self {
        Self {
            variant: Variant::Imf { sigma },
            activation: Activation::Threshold { t: threshold },
        }
    }

    pub fn acf(flip_rate: f64, threshold: f64) -> Self {
        Self {
            variant: Variant::Acf { flip_rate },
            activation: Activation::Threshold { t: threshold },
        }
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn kind(&self) -> VariantKind {
        self.variant.kind()
    }

    pub fn validate(&self) -> Result<()> {
        match self.variant {
            Variant::Imf { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => {
                return Err(Error::invalid(format!(
                    "sigma must be a finite value >= 0, got {sigma}"
                )))
            }
            Variant::Acf { flip_rate } if !(0.0..=1.0).contains(&flip_rate) => {
                return Err(Error::invalid(format!(
                    "flip-rate must lie in [0, 1], got {flip_rate}"
                )))
            }
            _ => {}
        }
        if let Activation::Threshold { t } = self.activation {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::invalid(format!(
                    "activation-threshold must be a finite value >= 0, got {t}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvergenceMode {
    /// Stop once the attention maxima exceed the convergence threshold.
    #[default]
    Early,
    /// Stop once no estimate changed across an iteration.
    Legacy,
}

/// Which factors must clear the threshold in early mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    #[default]
    All,
    Any,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Later factors see this iteration's updated estimates.
    #[default]
    Sequential,
    /// Every factor unbinds against the estimates from the iteration start.
    Parallel,
}

macro_rules! impl_from_str {
    ($ty:ty, $what:literal, $($name:literal => $val:expr),+) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($val),)+
                    other => Err(Error::invalid(format!(
                        concat!("unknown ", $what, " {:?}"), other
                    ))),
                }
            }
        }
    };
}

impl_from_str!(ConvergenceMode, "convergence mode", "early" => ConvergenceMode::Early, "legacy" => ConvergenceMode::Legacy);
impl_from_str!(Quantifier, "convergence quantifier", "all" => Quantifier::All, "any" => Quantifier::Any);
impl_from_str!(Schedule, "schedule", "sequential" => Schedule::Sequential, "parallel" => Schedule::Parallel);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizerConfig {
    pub variant: VariantSpec,
    pub factors: usize,
    pub codebook_size: usize,
    pub dim: usize,
    pub max_iters: usize,
    pub convergence_threshold: f64,
    pub convergence_mode: ConvergenceMode,
    pub quantifier: Quantifier,
    pub schedule: Schedule,
    pub seed: u64,
}

/// `min(M^F, 10 000)`: never more iterations than exhaustive search.
pub fn default_max_iters(codebook_size: usize, factors: usize) -> usize {
    let mut size: usize = 1;
    for _ in 0..factors {
        size = size.saturating_mul(codebook_size);
        if size >= MAX_ITERS_CEILING {
            return MAX_ITERS_CEILING;
        }
    }
    size.max(1)
}

impl FactorizerConfig {
    /// Configuration with the default iteration cap, threshold and schedule.
    pub fn new(
        variant: VariantSpec,
        factors: usize,
        codebook_size: usize,
        dim: usize,
        seed: u64,
    ) -> Self {
        Self {
            variant,
            factors,
            codebook_size,
            dim,
            max_iters: default_max_iters(codebook_size, factors),
            convergence_threshold: DEFAULT_CONVERGENCE_THRESHOLD,
            convergence_mode: ConvergenceMode::default(),
            quantifier: Quantifier::default(),
            schedule: Schedule::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.variant.validate()?;
        if self.factors < 2 {
            return Err(Error::invalid(format!(
                "at least 2 factors required, got {}",
                self.factors
            )));
        }
        if self.codebook_size < 2 {
            return Err(Error::invalid(format!(
                "codebook size must be at least 2, got {}",
                self.codebook_size
            )));
        }
        if self.dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max-iters must be at least 1"));
        }
        let t = self.convergence_threshold;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::invalid(format!(
                "convergence-threshold must lie in (0, 1], got {t}"
            )));
        }
        Ok(())
    }

    /// Checks the configuration and that `books` have the configured shape.
    pub fn validate_for(&self, books: &[Codebook]) -> Result<()> {
        self.validate()?;
        if books.len() != self.factors {
            return Err(Error::invalid(format!(
                "configured for {} factors but given {} codebooks",
                self.factors,
                books.len()
            )));
        }
        for (f, book) in books.iter().enumerate() {
            if book.len() != self.codebook_size || book.dim() != self.dim {
                return Err(Error::invalid(format!(
                    "codebook {f} is {}x{}, expected {}x{}",
                    book.len(),
                    book.dim(),
                    self.codebook_size,
                    self.dim
                )));
            }
        }
        Ok(())
    }
}
