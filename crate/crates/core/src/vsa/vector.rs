use std::fmt;

use rand::{Rng as _, RngCore};

use crate::error::{Error, Result};
use crate::kernels;

const WORD_BITS: usize = 64;

/// A vector over {-1, +1}^D, packed one bit per element (+1 ↦ 1, -1 ↦ 0).
///
/// Padding bits past `dim` in the last word are always zero, so equality
/// and hashing can compare words directly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BipolarVector {
    words: Vec<u64>,
    dim: usize,
}

fn word_count(dim: usize) -> usize {
    dim.div_ceil(WORD_BITS)
}

fn tail_mask(dim: usize) -> u64 {
    match dim % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl BipolarVector {
    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        Ok(())
    }

    fn from_words(mut words: Vec<u64>, dim: usize) -> Self {
        debug_assert_eq!(words.len(), word_count(dim));
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(dim);
        }
        Self { words, dim }
    }

    /// The all-(+1) vector, identity element of binding.
    pub fn ones(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self::from_words(vec![u64::MAX; word_count(dim)], dim))
    }

    pub fn random<R: RngCore + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        Self::check_dim(dim)?;
        let words = (0..word_count(dim)).map(|_| rng.next_u64()).collect();
        Ok(Self::from_words(words, dim))
    }

    /// Builds a vector from explicit ±1 entries; any other value is rejected.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        Self::check_dim(signs.len())?;
        let mut words = vec![0u64; word_count(signs.len())];
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => words[i / WORD_BITS] |= 1 << (i % WORD_BITS),
                -1 => {}
                other => {
                    return Err(Error::invalid(format!(
                        "element {i} is {other}, expected -1 or +1"
                    )))
                }
            }
        }
        Ok(Self::from_words(words, signs.len()))
    }

    /// Sign of each entry of a real vector; zeros are resolved by `rng` in
    /// index order.
    pub fn from_sums<T, R>(sums: &[T], rng: &mut R) -> Result<Self>
    where
        T: PartialOrd + Default + Copy,
        R: RngCore + ?Sized,
    {
        Self::check_dim(sums.len())?;
        let zero = T::default();
        let mut words = vec![0u64; word_count(sums.len())];
        for (i, &s) in sums.iter().enumerate() {
            let positive = if s > zero {
                true
            } else if s < zero {
                false
            } else {
                rng.random::<bool>()
            };
            if positive {
                words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        Ok(Self::from_words(words, sums.len()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Element `i` as -1 or +1.
    pub fn get(&self, i: usize) -> i8 {
        assert!(
            i < self.dim,
            "index {i} out of range for dimension {}",
            self.dim
        );
        if self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn to_signs(&self) -> Vec<i8> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }

    pub fn negate(&self) -> Self {
        Self::from_words(self.words.iter().map(|w| !w).collect(), self.dim)
    }

    /// Returns a copy with the listed positions negated.
    pub fn flip(&self, positions: &[usize]) -> Self {
        let mut words = self.words.clone();
        for &i in positions {
            assert!(i < self.dim);
            words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
        }
        Self::from_words(words, self.dim)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::invalid(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Element-wise product. In bit form the product of two signs is XNOR.
    pub fn bind(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.bind_unchecked(other))
    }

    pub(crate) fn bind_unchecked(&self, other: &Self) -> Self {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| !(a ^ b))
            .collect();
        Self::from_words(words, self.dim)
    }

    pub(crate) fn bind_assign_unchecked(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a = !(*a ^ *b);
        }
        let dim = self.dim;
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(dim);
        }
    }

    pub fn hamming(&self, other: &Self) -> Result<usize> {
        self.check_same_dim(other)?;
        Ok(self.hamming_unchecked(other))
    }

    #[inline]
    pub(crate) fn hamming_unchecked(&self, other: &Self) -> usize {
        kernels::hamming(&self.words, &other.words) as usize
    }

    /// Integer inner product, `D - 2 * hamming`.
    pub fn dot(&self, other: &Self) -> Result<i64> {
        self.check_same_dim(other)?;
        Ok(self.dot_unchecked(other))
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, other: &Self) -> i64 {
        self.dim as i64 - 2 * self.hamming_unchecked(other) as i64
    }

    /// Cosine similarity, `<x1, x2> / D`.
    pub fn similarity(&self, other: &Self) -> Result<f64> {
        Ok(self.dot(other)? as f64 / self.dim as f64)
    }

    /// Cyclic rotation by `k` positions: element `i` moves to `(i + k) mod D`.
    pub fn permute(&self, k: i64) -> Self {
        let d = self.dim as i64;
        let shift = k.rem_euclid(d) as usize;
        if shift == 0 {
            return self.clone();
        }
        let mut words = vec![0u64; self.words.len()];
        for i in 0..self.dim {
            if self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1 {
                let j = (i + shift) % self.dim;
                words[j / WORD_BITS] |= 1 << (j % WORD_BITS);
            }
        }
        Self::from_words(words, self.dim)
    }
}

impl fmt::Debug for BipolarVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 16;
        write!(f, "BipolarVector(D={}, [", self.dim)?;
        for i in 0..self.dim.min(SHOWN) {
            f.write_str(if self.get(i) > 0 { "+" } else { "-" })?;
        }
        if self.dim > SHOWN {
            f.write_str("…")?;
        }
        f.write_str("])")
    }
}
