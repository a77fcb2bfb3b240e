use super::config::{ConvergenceMode, FactorizerConfig, Quantifier, Schedule};
use super::perturb::{perturb_codebooks, PerturbedCodebooks};
use super::phases::{activate, argmax, associative_search_into, reconstruct_with, unbind_others};
use crate::error::{Error, Result};
use crate::rng::{substream, Rng, Stream};
use crate::scalar::Scalar;
use crate::vsa::{bundle, BipolarVector, Codebook};

/// Estimates and attentions of a running factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizerState<S> {
    pub estimates: Vec<BipolarVector>,
    /// Pre-activation attention of each factor from the latest step.
    pub attentions: Vec<Vec<S>>,
    pub iteration: usize,
    pub converged: bool,
}

impl<S: Scalar> FactorizerState<S> {
    /// A state at iteration 0 with the given estimates.
    pub fn from_estimates(estimates: Vec<BipolarVector>, codebook_size: usize) -> Self {
        let attentions = vec![vec![S::zero(); codebook_size]; estimates.len()];
        Self {
            estimates,
            attentions,
            iteration: 0,
            converged: false,
        }
    }

    /// Per-factor argmax of the latest attentions.
    pub fn decode(&self) -> Vec<usize> {
        self.attentions
            .iter()
            .map(|a| argmax(a).unwrap_or(0))
            .collect()
    }
}

/// Random streams owned by one run.
#[derive(Clone, Debug)]
pub struct RunRngs {
    pub ties: Rng,
    pub noise: Vec<Rng>,
}

impl RunRngs {
    pub fn new(seed: u64, factors: usize) -> Self {
        Self {
            ties: substream(seed, Stream::Ties),
            noise: (0..factors)
                .map(|f| substream(seed, Stream::Noise(f)))
                .collect(),
        }
    }
}

/// Initial estimate of each factor: the majority bundle of its whole
/// search codebook.
pub fn init_estimates<S: Scalar>(
    pbooks: &PerturbedCodebooks,
    rng: &mut Rng,
) -> Result<FactorizerState<S>> {
    let estimates = pbooks
        .search_books()
        .iter()
        .map(|b| bundle(b.vectors(), rng))
        .collect::<Result<Vec<_>>>()?;
    let m = pbooks.search(0).len();
    Ok(FactorizerState::from_estimates(estimates, m))
}

/// One iteration over all factors.
pub fn step<S: Scalar>(
    state: &mut FactorizerState<S>,
    x: &BipolarVector,
    pbooks: &PerturbedCodebooks,
    cfg: &FactorizerConfig,
    rngs: &mut RunRngs,
) -> Result<()> {
    if state.converged {
        return Err(Error::InvalidState(
            "step called on a converged state".into(),
        ));
    }
    let factors = pbooks.factors();
    if state.estimates.len() != factors || rngs.noise.len() != factors {
        return Err(Error::invalid(format!(
            "state has {} estimates and {} noise streams for {factors} factors",
            state.estimates.len(),
            rngs.noise.len()
        )));
    }
    let frozen = match cfg.schedule {
        Schedule::Parallel => Some(state.estimates.clone()),
        Schedule::Sequential => None,
    };
    let mut acc = Vec::new();
    for f in 0..factors {
        let basis = frozen.as_ref().unwrap_or(&state.estimates);
        let unbound = unbind_others(x, basis, f)?;
        associative_search_into(
            &unbound,
            pbooks.search(f),
            &cfg.variant,
            &mut rngs.noise[f],
            &mut state.attentions[f],
        )?;
        let activated = activate(&state.attentions[f], &cfg.variant.activation);
        state.estimates[f] =
            reconstruct_with(&activated, pbooks.recon(f), &mut rngs.ties, &mut acc)?;
    }
    state.iteration += 1;
    Ok(())
}

/// Early detection: the largest attention of every factor (or of any factor
/// under [`Quantifier::Any`]) strictly exceeds `threshold`.
pub fn detect_convergence_early<S: Scalar>(
    attentions: &[Vec<S>],
    threshold: S,
    quantifier: Quantifier,
) -> bool {
    let above = |a: &Vec<S>| a.iter().any(|&v| v > threshold);
    match quantifier {
        Quantifier::All => !attentions.is_empty() && attentions.iter().all(above),
        Quantifier::Any => attentions.iter().any(above),
    }
}

/// Legacy detection: no estimate changed.
pub fn detect_convergence_legacy(prev: &[BipolarVector], curr: &[BipolarVector]) -> bool {
    prev.len() == curr.len() && prev.iter().zip(curr).all(|(a, b)| a == b)
}

#[derive(Clone, Debug)]
pub struct RunOutcome<S> {
    pub indices: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub state: FactorizerState<S>,
}

/// Iterates `step` from `state` until convergence or `cfg.max_iters`.
pub fn iterate<S: Scalar>(
    mut state: FactorizerState<S>,
    x: &BipolarVector,
    pbooks: &PerturbedCodebooks,
    cfg: &FactorizerConfig,
    rngs: &mut RunRngs,
    mut observe: impl FnMut(&FactorizerState<S>),
) -> Result<RunOutcome<S>> {
    let threshold = S::from_f64_lossy(cfg.convergence_threshold);
    while state.iteration < cfg.max_iters {
        let prev = match cfg.convergence_mode {
            ConvergenceMode::Legacy => Some(state.estimates.clone()),
            ConvergenceMode::Early => None,
        };
        step(&mut state, x, pbooks, cfg, rngs)?;
        state.converged = match prev {
            Some(prev) => detect_convergence_legacy(&prev, &state.estimates),
            None => detect_convergence_early(&state.attentions, threshold, cfg.quantifier),
        };
        observe(&state);
        if state.converged {
            break;
        }
    }
    Ok(RunOutcome {
        indices: state.decode(),
        iterations: state.iteration,
        converged: state.converged,
        state,
    })
}

/// Factorizes `x` over `books`, deterministically in `cfg.seed`.
pub fn run<S: Scalar>(
    x: &BipolarVector,
    books: &[Codebook],
    cfg: &FactorizerConfig,
) -> Result<RunOutcome<S>> {
    run_observed(x, books, cfg, |_| {})
}

/// [`run`] with a callback after every iteration.
pub fn run_observed<S: Scalar>(
    x: &BipolarVector,
    books: &[Codebook],
    cfg: &FactorizerConfig,
    observe: impl FnMut(&FactorizerState<S>),
) -> Result<RunOutcome<S>> {
    cfg.validate_for(books)?;
    if x.dim() != cfg.dim {
        return Err(Error::invalid(format!(
            "product vector has dimension {}, expected {}",
            x.dim(),
            cfg.dim
        )));
    }
    let pbooks = perturb_codebooks(
        books,
        &cfg.variant,
        &mut substream(cfg.seed, Stream::Perturbation),
    )?;
    let mut rngs = RunRngs::new(cfg.seed, cfg.factors);
    let state = init_estimates(&pbooks, &mut rngs.ties)?;
    iterate(state, x, &pbooks, cfg, &mut rngs, observe)
}
