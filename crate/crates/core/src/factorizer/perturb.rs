use rand::{Rng as _, RngCore};

use super::config::{Variant, VariantSpec};
use crate::error::{Error, Result};
use crate::vsa::{BipolarVector, Codebook};

/// A D×M bit-flip mask stored as one length-D column per codevector.
/// Each entry is -1 (flip) with probability `flip_rate`, +1 otherwise.
pub fn generate_bfm<R: RngCore + ?Sized>(
    dim: usize,
    size: usize,
    flip_rate: f64,
    rng: &mut R,
) -> Result<Vec<BipolarVector>> {
    if !(0.0..=1.0).contains(&flip_rate) {
        return Err(Error::invalid(format!(
            "flip-rate must lie in [0, 1], got {flip_rate}"
        )));
    }
    (0..size)
        .map(|_| {
            let signs: Vec<i8> = (0..dim)
                .map(|_| {
                    if rng.random::<f64>() < flip_rate {
                        -1
                    } else {
                        1
                    }
                })
                .collect();
            BipolarVector::from_signs(&signs)
        })
        .collect()
}

/// Search and reconstruction codebooks of one run.
///
/// For ACF the reconstruction copy is the search copy times a mask drawn once
/// at construction; for BRN and IMF both roles share the same codebooks.
#[derive(Clone, Debug)]
pub struct PerturbedCodebooks {
    search: Vec<Codebook>,
    recon: Option<Vec<Codebook>>,
    masks: Option<Vec<Vec<BipolarVector>>>,
}

impl PerturbedCodebooks {
    pub fn factors(&self) -> usize {
        self.search.len()
    }

    pub fn search(&self, f: usize) -> &Codebook {
        &self.search[f]
    }

    pub fn recon(&self, f: usize) -> &Codebook {
        match &self.recon {
            Some(books) => &books[f],
            None => &self.search[f],
        }
    }

    pub fn search_books(&self) -> &[Codebook] {
        &self.search
    }

    /// Whether the reconstruction role reuses the search codebooks.
    pub fn is_symmetric(&self) -> bool {
        self.recon.is_none()
    }

    pub fn masks(&self) -> Option<&[Vec<BipolarVector>]> {
        self.masks.as_deref()
    }
}

pub fn perturb_codebooks<R: RngCore + ?Sized>(
    books: &[Codebook],
    spec: &VariantSpec,
    rng: &mut R,
) -> Result<PerturbedCodebooks> {
    let search = books.to_vec();
    match spec.variant {
        Variant::Acf { flip_rate } => {
            let masks = books
                .iter()
                .map(|b| generate_bfm(b.dim(), b.len(), flip_rate, rng))
                .collect::<Result<Vec<_>>>()?;
            let recon = books
                .iter()
                .zip(&masks)
                .map(|(b, m)| b.masked(m))
                .collect::<Result<Vec<_>>>()?;
            Ok(PerturbedCodebooks {
                search,
                recon: Some(recon),
                masks: Some(masks),
            })
        }
        Variant::Brn | Variant::Imf { .. } => Ok(PerturbedCodebooks {
            search,
            recon: None,
            masks: None,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::vsa::similarity;

    #[test]
    fn mask_extremes() {
        let m0 = generate_bfm(100, 3, 0.0, &mut seeded(1)).unwrap();
        assert!(m0.iter().all(|c| c.to_signs().iter().all(|&s| s == 1)));
        let m1 = generate_bfm(100, 3, 1.0, &mut seeded(1)).unwrap();
        assert!(m1.iter().all(|c| c.to_signs().iter().all(|&s| s == -1)));
        assert!(generate_bfm(10, 2, 1.5, &mut seeded(1)).is_err());
        assert!(generate_bfm(10, 2, -0.1, &mut seeded(1)).is_err());
    }

    #[test]
    fn mask_flip_fraction() {
        // D*M = 2e6 entries; 3 sigma of the binomial fraction is 6.4e-4.
        let masks = generate_bfm(1000, 2000, 0.1, &mut seeded(2)).unwrap();
        let flipped: usize = masks
            .iter()
            .map(|c| c.to_signs().iter().filter(|&&s| s == -1).count())
            .sum();
        let frac = flipped as f64 / 2e6;
        assert!((frac - 0.1).abs() < 0.001, "{frac}");
    }

    #[test]
    fn brn_and_imf_alias_search_books() {
        let books = vec![Codebook::generate(4, 64, &mut seeded(3)).unwrap(); 2];
        for spec in [VariantSpec::brn(), VariantSpec::imf(0.01, 0.0)] {
            let p = perturb_codebooks(&books, &spec, &mut seeded(4)).unwrap();
            assert!(p.is_symmetric());
            for f in 0..2 {
                assert_eq!(p.recon(f), p.search(f));
            }
        }
    }

    #[test]
    fn acf_zero_rate_is_unperturbed() {
        let books = vec![Codebook::generate(4, 64, &mut seeded(3)).unwrap(); 2];
        let p = perturb_codebooks(&books, &VariantSpec::acf(0.0, 0.0), &mut seeded(4)).unwrap();
        for f in 0..2 {
            assert_eq!(p.recon(f), p.search(f));
        }
    }

    #[test]
    fn acf_recon_is_masked_search() {
        let books = vec![Codebook::generate(20, 1000, &mut seeded(5)).unwrap()];
        let p = perturb_codebooks(&books, &VariantSpec::acf(0.1, 0.0), &mut seeded(6)).unwrap();
        let masks = &p.masks().unwrap()[0];
        for (i, mask) in masks.iter().enumerate() {
            let s = p.search(0).get(i).unwrap();
            let r = p.recon(0).get(i).unwrap();
            assert_eq!(*r, s.bind(mask).unwrap());
            // Expected 1 - 2r = 0.8; the binomial 3 sigma band is about 0.057.
            let sim = similarity(s, r).unwrap();
            assert!((sim - 0.8).abs() <= 0.08, "{sim}");
        }
    }
}
