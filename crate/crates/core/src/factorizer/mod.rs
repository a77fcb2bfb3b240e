//! Resonator-network factorization of bipolar product vectors.
//!
//! Each iteration walks the factors and, per factor, unbinds the other
//! estimates from the product, searches the codebook, activates the
//! attention and reconstructs a new estimate. Three variants share this loop:
//!
//! * BRN, the deterministic baseline;
//! * IMF, which adds fresh Gaussian noise to every attention vector;
//! * ACF, which reconstructs from a copy of the codebook perturbed once by a
//!   random bit-flip mask.

mod config;
mod engine;
mod perturb;
mod phases;

pub use config::{
    default_max_iters, Activation, ConvergenceMode, FactorizerConfig, Quantifier, Schedule,
    Variant, VariantKind, VariantSpec, DEFAULT_CONVERGENCE_THRESHOLD, MAX_ITERS_CEILING,
};
pub use engine::{
    detect_convergence_early, detect_convergence_legacy, init_estimates, iterate, run,
    run_observed, step, FactorizerState, RunOutcome, RunRngs,
};
pub use perturb::{generate_bfm, perturb_codebooks, PerturbedCodebooks};
pub use phases::{
    activate, argmax, associative_search, reconstruct, threshold_activation, unbind_others,
};
