//! Bipolar vector-symbolic algebra: binding, bundling, permutation,
//! similarity and associative clean-up over {-1, +1}^D.

mod codebook;
mod vector;

pub use codebook::Codebook;
pub use vector::BipolarVector;

use rand::RngCore;

use crate::error::{Error, Result};

pub fn random_bipolar<R: RngCore + ?Sized>(dim: usize, rng: &mut R) -> Result<BipolarVector> {
    BipolarVector::random(dim, rng)
}

pub fn bind(x1: &BipolarVector, x2: &BipolarVector) -> Result<BipolarVector> {
    x1.bind(x2)
}

/// Binding is self-inverse in bipolar space, so unbinding is the same product.
pub fn unbind(p: &BipolarVector, x: &BipolarVector) -> Result<BipolarVector> {
    p.bind(x)
}

/// Element-wise majority. Positions whose sum is exactly zero are drawn
/// uniformly from `rng`, in index order.
pub fn bundle<R: RngCore + ?Sized>(xs: &[BipolarVector], rng: &mut R) -> Result<BipolarVector> {
    let first = xs
        .first()
        .ok_or_else(|| Error::invalid("cannot bundle an empty list"))?;
    let dim = first.dim();
    if let Some(bad) = xs.iter().position(|x| x.dim() != dim) {
        return Err(Error::invalid(format!(
            "vector {bad} has dimension {}, expected {dim}",
            xs[bad].dim()
        )));
    }
    let mut sums = vec![0i64; dim];
    for x in xs {
        accumulate_signs(x, &mut sums);
    }
    BipolarVector::from_sums(&sums, rng)
}

fn accumulate_signs(x: &BipolarVector, sums: &mut [i64]) {
    for (w, chunk) in x.words().iter().zip(sums.chunks_mut(64)) {
        for (b, s) in chunk.iter_mut().enumerate() {
            *s += ((w >> b & 1) as i64) * 2 - 1;
        }
    }
}

pub fn similarity(x1: &BipolarVector, x2: &BipolarVector) -> Result<f64> {
    x1.similarity(x2)
}

pub fn permute(x: &BipolarVector, k: i64) -> BipolarVector {
    x.permute(k)
}

pub fn cleanup(query: &BipolarVector, book: &Codebook) -> Result<usize> {
    book.cleanup(query)
}

pub fn generate_codebook<R: RngCore + ?Sized>(
    size: usize,
    dim: usize,
    rng: &mut R,
) -> Result<Codebook> {
    Codebook::generate(size, dim, rng)
}

/// Product vector `⊙_f books[f][indices[f]]`.
pub fn bind_product(books: &[Codebook], indices: &[usize]) -> Result<BipolarVector> {
    if books.len() < 2 {
        return Err(Error::invalid(format!(
            "a product needs at least 2 factors, got {}",
            books.len()
        )));
    }
    if books.len() != indices.len() {
        return Err(Error::invalid(format!(
            "{} codebooks but {} indices",
            books.len(),
            indices.len()
        )));
    }
    let dim = books[0].dim();
    let mut product = BipolarVector::ones(dim)?;
    for (f, (book, &i)) in books.iter().zip(indices).enumerate() {
        if book.dim() != dim {
            return Err(Error::invalid(format!(
                "codebook {f} has dimension {}, expected {dim}",
                book.dim()
            )));
        }
        let v = book.get(i).ok_or_else(|| {
            Error::invalid(format!(
                "index {i} out of range for codebook {f} of size {}",
                book.len()
            ))
        })?;
        product.bind_assign_unchecked(v);
    }
    Ok(product)
}
