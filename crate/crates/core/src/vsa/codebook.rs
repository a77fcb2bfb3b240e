use rand::RngCore;

use super::BipolarVector;
use crate::error::{Error, Result};

/// M codevectors of a shared dimension D for one factor.
///
/// Besides the packed vectors the codebook keeps a dense row-major ±1 copy,
/// which the reconstruction superposition streams through.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    vectors: Vec<BipolarVector>,
    dense: Vec<i8>,
    dim: usize,
}

impl Codebook {
    /// Wraps existing codevectors. At least one vector is required; generated
    /// codebooks additionally require two.
    pub fn new(vectors: Vec<BipolarVector>) -> Result<Self> {
        let dim = match vectors.first() {
            Some(v) => v.dim(),
            None => return Err(Error::invalid("codebook needs at least one codevector")),
        };
        if let Some(bad) = vectors.iter().position(|v| v.dim() != dim) {
            return Err(Error::invalid(format!(
                "codevector {bad} has dimension {}, expected {dim}",
                vectors[bad].dim()
            )));
        }
        let dense = vectors.iter().flat_map(|v| v.to_signs()).collect();
        Ok(Self {
            vectors,
            dense,
            dim,
        })
    }

    pub fn generate<R: RngCore + ?Sized>(size: usize, dim: usize, rng: &mut R) -> Result<Self> {
        if size < 2 {
            return Err(Error::invalid(format!(
                "codebook size must be at least 2, got {size}"
            )));
        }
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let vectors = (0..size)
            .map(|_| BipolarVector::random(dim, rng))
            .collect::<Result<_>>()?;
        Self::new(vectors)
    }

    /// Number of codevectors, M.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[BipolarVector] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> Option<&BipolarVector> {
        self.vectors.get(i)
    }

    /// All dense ±1 entries, row-major (M rows of length D).
    pub fn rows(&self) -> &[i8] {
        &self.dense
    }

    /// Dense ±1 entries of codevector `i`.
    pub fn row(&self, i: usize) -> &[i8] {
        &self.dense[i * self.dim..(i + 1) * self.dim]
    }

    /// Index of the most similar codevector; the lowest index wins ties.
    pub fn cleanup(&self, query: &BipolarVector) -> Result<usize> {
        if query.dim() != self.dim {
            return Err(Error::invalid(format!(
                "query dimension {} does not match codebook dimension {}",
                query.dim(),
                self.dim
            )));
        }
        let mut best = 0;
        let mut best_hamming = usize::MAX;
        for (i, v) in self.vectors.iter().enumerate() {
            let h = v.hamming_unchecked(query);
            if h < best_hamming {
                best = i;
                best_hamming = h;
            }
        }
        Ok(best)
    }

    /// Multiplies every codevector element-wise by the matching mask row.
    pub fn masked(&self, masks: &[BipolarVector]) -> Result<Self> {
        if masks.len() != self.len() {
            return Err(Error::invalid(format!(
                "{} masks for {} codevectors",
                masks.len(),
                self.len()
            )));
        }
        let vectors = self
            .vectors
            .iter()
            .zip(masks)
            .map(|(v, m)| v.bind(m))
            .collect::<Result<_>>()?;
        Self::new(vectors)
    }
}
