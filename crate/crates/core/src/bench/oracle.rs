use crate::error::{Error, Result};
use crate::vsa::{BipolarVector, Codebook};

/// Largest search space the oracle enumerates unless told otherwise.
pub const DEFAULT_ORACLE_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub indices: Vec<usize>,
    pub similarity: f64,
}

/// `Π_f |books[f]|`, saturating into `u128`.
pub fn search_space(books: &[Codebook]) -> u128 {
    books
        .iter()
        .fold(1u128, |acc, b| acc.saturating_mul(b.len() as u128))
}

/// Exhaustive factorization: binds every index tuple and keeps the one most
/// similar to `x`. Ties go to the lexicographically smallest tuple.
pub fn brute_force_oracle(x: &BipolarVector, books: &[Codebook], cap: u64) -> Result<OracleResult> {
    if books.is_empty() {
        return Err(Error::invalid("oracle needs at least one codebook"));
    }
    let size = search_space(books);
    if size > cap as u128 {
        return Err(Error::OracleCapExceeded { size, cap });
    }
    if let Some(f) = books.iter().position(|b| b.dim() != x.dim()) {
        return Err(Error::invalid(format!(
            "codebook {f} has dimension {}, product has {}",
            books[f].dim(),
            x.dim()
        )));
    }

    // Partial products are shared across the tuples of each prefix.
    let factors = books.len();
    let mut idx = vec![0usize; factors];
    let mut partial: Vec<BipolarVector> = Vec::with_capacity(factors);
    partial.push(x.bind_unchecked(&books[0].vectors()[0]));
    for f in 1..factors {
        let next = partial[f - 1].bind_unchecked(&books[f].vectors()[0]);
        partial.push(next);
    }

    let mut best = idx.clone();
    // Minimizing the distance of x ⊙ candidate from all-ones is maximizing
    // similarity(candidate, x).
    let ones = BipolarVector::ones(x.dim())?;
    let mut best_hamming = partial[factors - 1].hamming_unchecked(&ones);
    loop {
        // Odometer increment from the last factor.
        let mut f = factors;
        loop {
            if f == 0 {
                let d = x.dim() as f64;
                return Ok(OracleResult {
                    indices: best,
                    similarity: (d - 2.0 * best_hamming as f64) / d,
                });
            }
            f -= 1;
            idx[f] += 1;
            if idx[f] < books[f].len() {
                break;
            }
            idx[f] = 0;
        }
        for g in f..factors {
            let base = if g == 0 { x } else { &partial[g - 1] };
            partial[g] = base.bind_unchecked(&books[g].vectors()[idx[g]]);
        }
        let h = partial[factors - 1].hamming_unchecked(&ones);
        if h < best_hamming {
            best_hamming = h;
            best.copy_from_slice(&idx);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::vsa::{bind_product, similarity};
    use rand::seq::index::sample;

    fn v(s: &[i8]) -> BipolarVector {
        BipolarVector::from_signs(s).unwrap()
    }

    #[test]
    fn exact_product_is_found() {
        let mut rng = seeded(1);
        let books: Vec<_> = (0..2)
            .map(|_| Codebook::generate(4, 256, &mut rng).unwrap())
            .collect();
        let x = bind_product(&books, &[2, 1]).unwrap();
        let r = brute_force_oracle(&x, &books, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.indices, vec![2, 1]);
        assert_eq!(r.similarity, 1.0);
    }

    #[test]
    fn hand_enumerated_two_by_two() {
        let a = Codebook::new(vec![v(&[1, 1, 1, 1]), v(&[1, -1, 1, -1])]).unwrap();
        let b = Codebook::new(vec![v(&[1, 1, -1, -1]), v(&[1, 1, 1, 1])]).unwrap();
        // Candidates: a0⊙b0 = [+ + - -], a0⊙b1 = [+ + + +],
        //             a1⊙b0 = [+ - - +], a1⊙b1 = [+ - + -].
        let x = v(&[1, -1, -1, -1]);
        // Similarities: 0.5, 0.0, 0.5, 0.0 -> tie resolved to (0, 0).
        let r = brute_force_oracle(&x, &[a.clone(), b.clone()], 100).unwrap();
        assert_eq!(r.indices, vec![0, 0]);
        assert_eq!(r.similarity, 0.5);
        let r = brute_force_oracle(&v(&[1, -1, 1, -1]), &[a, b], 100).unwrap();
        assert_eq!(r.indices, vec![1, 1]);
    }

    #[test]
    fn survives_five_percent_noise() {
        let mut rng = seeded(2);
        let books: Vec<_> = (0..2)
            .map(|_| Codebook::generate(8, 1000, &mut rng).unwrap())
            .collect();
        let clean = bind_product(&books, &[5, 3]).unwrap();
        let flips = sample(&mut rng, 1000, 50).into_vec();
        let x = clean.flip(&flips);
        let r = brute_force_oracle(&x, &books, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.indices, vec![5, 3]);
        assert!((r.similarity - 0.9).abs() < 1e-12);
    }

    #[test]
    fn matches_naive_enumeration_for_three_factors() {
        let mut rng = seeded(3);
        let books: Vec<_> = (0..3)
            .map(|_| Codebook::generate(5, 40, &mut rng).unwrap())
            .collect();
        let x = BipolarVector::random(40, &mut rng).unwrap();
        let mut best = (vec![0, 0, 0], f64::NEG_INFINITY);
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    let c = bind_product(&books, &[i, j, k]).unwrap();
                    let s = similarity(&c, &x).unwrap();
                    if s > best.1 {
                        best = (vec![i, j, k], s);
                    }
                }
            }
        }
        let r = brute_force_oracle(&x, &books, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.indices, best.0);
        assert_eq!(r.similarity, best.1);
    }

    #[test]
    fn refuses_above_cap() {
        let mut rng = seeded(4);
        let books: Vec<_> = (0..2)
            .map(|_| Codebook::generate(11, 16, &mut rng).unwrap())
            .collect();
        let x = BipolarVector::random(16, &mut rng).unwrap();
        assert!(matches!(
            brute_force_oracle(&x, &books, 120),
            Err(Error::OracleCapExceeded {
                size: 121,
                cap: 120
            })
        ));
        assert!(brute_force_oracle(&x, &books, 121).is_ok());
    }
}
