//! The four resonator phases for a single factor: unbinding, associative
//! search, attention activation and reconstruction.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::config::{Activation, Variant, VariantSpec};
use crate::error::{Error, Result};
use crate::kernels;
use crate::scalar::Scalar;
use crate::vsa::{BipolarVector, Codebook};

/// `x ⊙ (⊙_{g≠f} estimates[g])`.
pub fn unbind_others(
    x: &BipolarVector,
    estimates: &[BipolarVector],
    f: usize,
) -> Result<BipolarVector> {
    if f >= estimates.len() {
        return Err(Error::invalid(format!(
            "factor index {f} out of range for {} estimates",
            estimates.len()
        )));
    }
    let mut out = x.clone();
    for (g, e) in estimates.iter().enumerate() {
        if g == f {
            continue;
        }
        if e.dim() != x.dim() {
            return Err(Error::invalid(format!(
                "estimate {g} has dimension {}, product has {}",
                e.dim(),
                x.dim()
            )));
        }
        out.bind_assign_unchecked(e);
    }
    Ok(out)
}

/// Attention `α[i] = sim(unbound, book[i])`, plus i.i.d. `N(0, σ²)` noise for
/// IMF. `rng` is only consumed by IMF.
pub fn associative_search<S: Scalar, R: RngCore + ?Sized>(
    unbound: &BipolarVector,
    book: &Codebook,
    spec: &VariantSpec,
    rng: &mut R,
) -> Result<Vec<S>> {
    let mut alpha = Vec::with_capacity(book.len());
    associative_search_into(unbound, book, spec, rng, &mut alpha)?;
    Ok(alpha)
}

pub(crate) fn associative_search_into<S: Scalar, R: RngCore + ?Sized>(
    unbound: &BipolarVector,
    book: &Codebook,
    spec: &VariantSpec,
    rng: &mut R,
    alpha: &mut Vec<S>,
) -> Result<()> {
    if unbound.dim() != book.dim() {
        return Err(Error::invalid(format!(
            "unbound vector has dimension {}, codebook has {}",
            unbound.dim(),
            book.dim()
        )));
    }
    let d = S::from_usize_lossy(book.dim());
    alpha.clear();
    alpha.extend(
        book.vectors()
            .iter()
            .map(|v| S::from_f64_lossy(v.dot_unchecked(unbound) as f64) / d),
    );
    if let Variant::Imf { sigma } = spec.variant {
        let sigma = S::from_f64_lossy(sigma);
        for a in alpha.iter_mut() {
            let n: f64 = StandardNormal.sample(rng);
            *a += sigma * S::from_f64_lossy(n);
        }
    }
    Ok(())
}

/// `α'[i] = α[i]` if `α[i] > t`, else 0.
pub fn threshold_activation<S: Scalar>(alpha: &[S], t: S) -> Vec<S> {
    alpha
        .iter()
        .map(|&a| if a > t { a } else { S::zero() })
        .collect()
}

pub fn activate<S: Scalar>(alpha: &[S], activation: &Activation) -> Vec<S> {
    match *activation {
        Activation::Identity => alpha.to_vec(),
        Activation::Threshold { t } => threshold_activation(alpha, S::from_f64_lossy(t)),
    }
}

/// `sign(Σ_i activated[i] · book[i])`.
///
/// Exact zeros in the superposition are resolved by `rng`. An all-zero
/// attention carries no information, so the estimate restarts from a fresh
/// random vector.
pub fn reconstruct<S: Scalar, R: RngCore + ?Sized>(
    activated: &[S],
    book: &Codebook,
    rng: &mut R,
) -> Result<BipolarVector> {
    let mut acc = Vec::new();
    reconstruct_with(activated, book, rng, &mut acc)
}

pub(crate) fn reconstruct_with<S: Scalar, R: RngCore + ?Sized>(
    activated: &[S],
    book: &Codebook,
    rng: &mut R,
    acc: &mut Vec<S>,
) -> Result<BipolarVector> {
    if activated.len() != book.len() {
        return Err(Error::invalid(format!(
            "attention has length {}, codebook has {} codevectors",
            activated.len(),
            book.len()
        )));
    }
    if activated.iter().all(|a| a.is_zero()) {
        return BipolarVector::random(book.dim(), rng);
    }
    acc.clear();
    acc.resize(book.dim(), S::zero());
    kernels::superpose(acc, book.rows(), activated);
    BipolarVector::from_sums(acc, rng)
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax<S: Scalar>(alpha: &[S]) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (i, &a) in alpha.iter().enumerate() {
        match best {
            Some((_, b)) if a <= b => {}
            _ => best = Some((i, a)),
        }
    }
    best.map(|(i, _)| i)
}
