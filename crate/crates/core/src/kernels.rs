//! Hot loops of the resonator: packed Hamming distances for associative
//! search and the signed superposition of reconstruction.
//!
//! On x86-64 the loops are compiled a second time with AVX2 and POPCNT
//! enabled and picked at runtime; results are identical either way.

use crate::scalar::Scalar;

#[inline(always)]
fn hamming_portable(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

#[inline(always)]
fn superpose_portable<S: Scalar>(acc: &mut [S], rows: &[i8], weights: &[S]) {
    let dim = acc.len();
    for (row, &w) in rows.chunks_exact(dim).zip(weights) {
        if w.is_zero() {
            continue;
        }
        for (a, &s) in acc.iter_mut().zip(row) {
            *a += w * S::from_i8(s).unwrap_or_else(S::zero);
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod x86 {
    use super::*;

    #[target_feature(enable = "popcnt")]
    pub(super) unsafe fn hamming(a: &[u64], b: &[u64]) -> u32 {
        hamming_portable(a, b)
    }

    #[target_feature(enable = "avx2,popcnt")]
    pub(super) unsafe fn superpose<S: Scalar>(acc: &mut [S], rows: &[i8], weights: &[S]) {
        superpose_portable(acc, rows, weights)
    }

    #[target_feature(enable = "avx512f,avx512bw,avx2,popcnt")]
    pub(super) unsafe fn superpose_512<S: Scalar>(acc: &mut [S], rows: &[i8], weights: &[S]) {
        superpose_portable(acc, rows, weights)
    }

    pub(super) fn has_avx512() -> bool {
        std::is_x86_feature_detected!("avx512f")
            && std::is_x86_feature_detected!("avx512bw")
            && has_avx2()
    }

    pub(super) fn has_popcnt() -> bool {
        std::is_x86_feature_detected!("popcnt")
    }

    pub(super) fn has_avx2() -> bool {
        std::is_x86_feature_detected!("avx2") && std::is_x86_feature_detected!("popcnt")
    }
}

/// Number of differing bits between two equally long word slices.
#[inline]
pub fn hamming(a: &[u64], b: &[u64]) -> u32 {
    debug_assert_eq!(a.len(), b.len());
    #[cfg(target_arch = "x86_64")]
    if x86::has_popcnt() {
        // SAFETY: the required CPU feature was detected above.
        return unsafe { x86::hamming(a, b) };
    }
    hamming_portable(a, b)
}

/// `acc[d] += Σ_i weights[i] * rows[i][d]` for ±1 rows stored row-major.
pub fn superpose<S: Scalar>(acc: &mut [S], rows: &[i8], weights: &[S]) {
    assert_eq!(rows.len(), acc.len() * weights.len());
    #[cfg(target_arch = "x86_64")]
    if x86::has_avx512() {
        // SAFETY: the required CPU features were detected above.
        unsafe { x86::superpose_512(acc, rows, weights) };
        return;
    }
    #[cfg(target_arch = "x86_64")]
    if x86::has_avx2() {
        // SAFETY: the required CPU features were detected above.
        unsafe { x86::superpose(acc, rows, weights) };
        return;
    }
    superpose_portable(acc, rows, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dispatched_matches_portable() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Vec<u64> = (0..37).map(|_| rng.random()).collect();
        let b: Vec<u64> = (0..37).map(|_| rng.random()).collect();
        assert_eq!(hamming(&a, &b), hamming_portable(&a, &b));

        let dim = 131;
        let rows: Vec<i8> = (0..dim * 9)
            .map(|_| if rng.random() { 1 } else { -1 })
            .collect();
        let weights: Vec<f64> = (0..9)
            .map(|i| if i % 3 == 0 { 0.0 } else { rng.random() })
            .collect();
        let mut fast = vec![0.0f64; dim];
        let mut slow = vec![0.0f64; dim];
        superpose(&mut fast, &rows, &weights);
        superpose_portable(&mut slow, &rows, &weights);
        assert_eq!(fast, slow);
    }
}
