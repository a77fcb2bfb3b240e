//! Resonator-network factorizers over bipolar hypervectors.
//!
//! [`vsa`] holds the bipolar algebra, [`factorizer`] the baseline,
//! iterative-noise and asymmetric-codebook resonators, and [`bench`] the
//! Monte-Carlo capacity harness with its brute-force oracle.
//!
//! Attention vectors are generic over [`Scalar`]; the aliases below fix the
//! common `f64` and `f32` instantiations.

pub mod bench;
pub mod error;
pub mod factorizer;
mod kernels;
pub mod rng;
pub mod scalar;
pub mod vsa;

pub use error::{Error, Result};
pub use factorizer::{FactorizerConfig, VariantKind, VariantSpec};
pub use scalar::Scalar;
pub use vsa::{BipolarVector, Codebook};

pub type FactorizerState = factorizer::FactorizerState<f64>;
pub type FactorizerState32 = factorizer::FactorizerState<f32>;
pub type RunOutcome = factorizer::RunOutcome<f64>;
pub type RunOutcome32 = factorizer::RunOutcome<f32>;
