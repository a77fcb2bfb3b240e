use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::factorizer::{self, FactorizerConfig};
use crate::rng::{stream_seed, substream, Stream};
use crate::scalar::Scalar;
use crate::vsa::{bind_product, BipolarVector, Codebook};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    /// The run converged and every decoded index matched the planted one.
    /// A run stopped by the iteration cap never counts as correct.
    pub correct: bool,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
}

/// A planted factorization problem.
#[derive(Clone, Debug)]
pub struct Instance {
    pub books: Vec<Codebook>,
    pub truth: Vec<usize>,
    pub product: BipolarVector,
}

impl Instance {
    /// Fresh codebooks and uniformly drawn ground-truth indices from `seed`.
    pub fn generate(seed: u64, factors: usize, codebook_size: usize, dim: usize) -> Result<Self> {
        let mut book_rng = substream(seed, Stream::Codebooks);
        let books = (0..factors)
            .map(|_| Codebook::generate(codebook_size, dim, &mut book_rng))
            .collect::<Result<Vec<_>>>()?;
        let mut truth_rng = substream(seed, Stream::GroundTruth);
        let truth: Vec<usize> = (0..factors)
            .map(|_| truth_rng.random_range(0..codebook_size))
            .collect();
        let product = bind_product(&books, &truth)?;
        Ok(Self {
            books,
            truth,
            product,
        })
    }
}

/// Seed handed to the factorizer of the trial seeded with `trial_seed`.
pub fn factorizer_seed(trial_seed: u64) -> u64 {
    stream_seed(trial_seed, Stream::Factorizer)
}

/// Generates an instance from `trial_seed`, factorizes it with `template`
/// (whose `seed` is replaced by one derived from `trial_seed`) and scores
/// the decode against the planted indices.
pub fn run_trial<S: Scalar>(trial_seed: u64, template: &FactorizerConfig) -> Result<TrialResult> {
    let (result, _) = run_trial_detailed::<S>(trial_seed, template)?;
    Ok(result)
}

/// [`run_trial`] that also returns the instance and decoded indices.
pub fn run_trial_detailed<S: Scalar>(
    trial_seed: u64,
    template: &FactorizerConfig,
) -> Result<(TrialResult, TrialDetail)> {
    template.validate()?;
    let instance = Instance::generate(
        trial_seed,
        template.factors,
        template.codebook_size,
        template.dim,
    )?;
    let cfg = FactorizerConfig {
        seed: factorizer_seed(trial_seed),
        ..template.clone()
    };
    let out = factorizer::run::<S>(&instance.product, &instance.books, &cfg)?;
    let result = TrialResult {
        correct: out.converged && out.indices == instance.truth,
        iterations: out.iterations,
        converged: out.converged,
        seed: trial_seed,
    };
    Ok((
        result,
        TrialDetail {
            decoded: out.indices,
            instance,
        },
    ))
}

#[derive(Clone, Debug)]
pub struct TrialDetail {
    pub decoded: Vec<usize>,
    pub instance: Instance,
}
