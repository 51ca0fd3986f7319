//! Probabilistic amplitude shaping: PAM alphabets and labelings,
//! Maxwell-Boltzmann distributions, constant composition distribution
//! matching and frame assembly.

mod alphabet;
mod ccdm;
mod distribution;

pub use alphabet::{gray, PamAlphabet};
pub use ccdm::{ccdm_decode, ccdm_encode, ccdm_input_bits, ccdm_rate_bits_per_symbol, Composition};
pub use distribution::{
    entropy_bits, maxwell_boltzmann, nu_for_entropy, SymbolDistribution, ENTROPY_TOLERANCE_BITS,
};

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream, Seed};

/// A PAM symbol sequence with its alphabet, labeling and prior.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    alphabet: PamAlphabet,
    distribution: SymbolDistribution,
    indices: Vec<usize>,
}

impl SymbolFrame {
    pub fn new(
        alphabet: PamAlphabet,
        distribution: SymbolDistribution,
        indices: Vec<usize>,
    ) -> Result<Self> {
        if distribution.len() != alphabet.size() {
            return Err(Error::param("distribution and alphabet sizes differ"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= alphabet.size()) {
            return Err(Error::param(format!("level index {bad} out of range")));
        }
        Ok(SymbolFrame {
            alphabet,
            distribution,
            indices,
        })
    }

    pub fn alphabet(&self) -> &PamAlphabet {
        &self.alphabet
    }

    pub fn distribution(&self) -> &SymbolDistribution {
        &self.distribution
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Amplitude of every symbol.
    pub fn levels(&self) -> Vec<f64> {
        let lv = self.alphabet.levels();
        self.indices.iter().map(|&i| lv[i]).collect()
    }

    /// Label bits of every symbol, most significant first.
    pub fn bits(&self) -> Vec<u8> {
        let m = self.alphabet.label_bits();
        let mut out = Vec::with_capacity(self.indices.len() * m);
        for &i in &self.indices {
            out.extend((0..m).map(|b| self.alphabet.label_bit(i, b)));
        }
        out
    }

    /// Entropy of the frame's prior in bits per symbol.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.distribution)
    }

    /// Sub-frame of symbols `range`, sharing alphabet and prior.
    pub fn slice(&self, range: std::ops::Range<usize>) -> SymbolFrame {
        SymbolFrame {
            alphabet: self.alphabet.clone(),
            distribution: self.distribution.clone(),
            indices: self.indices[range].to_vec(),
        }
    }
}

/// Combines amplitude classes with sign bits (0 = positive) into a frame.
///
/// The frame prior is the empirical class distribution split evenly between
/// the two signs.
pub fn pas_assemble(
    amplitude_classes: &[usize],
    sign_bits: &[u8],
    alphabet: &PamAlphabet,
) -> Result<SymbolFrame> {
    if amplitude_classes.len() != sign_bits.len() {
        return Err(Error::param(format!(
            "{} amplitude classes but {} sign bits",
            amplitude_classes.len(),
            sign_bits.len()
        )));
    }
    if !alphabet.is_symmetric() {
        return Err(Error::param(
            "probabilistic amplitude shaping needs a symmetric alphabet",
        ));
    }
    let classes = alphabet.magnitude_classes();
    let mut class_counts = vec![0usize; classes];
    let mut indices = Vec::with_capacity(amplitude_classes.len());
    for (&c, &s) in amplitude_classes.iter().zip(sign_bits) {
        if c >= classes {
            return Err(Error::param(format!("amplitude class {c} out of range")));
        }
        if s > 1 {
            return Err(Error::param(format!("sign bit value {s} is not 0 or 1")));
        }
        class_counts[c] += 1;
        indices.push(alphabet.signed_index(c, s == 1));
    }
    let n = amplitude_classes.len().max(1) as f64;
    let mut probs = vec![0.0; alphabet.size()];
    for (c, &k) in class_counts.iter().enumerate() {
        let p = k as f64 / n / 2.0;
        probs[alphabet.signed_index(c, false)] = p;
        probs[alphabet.signed_index(c, true)] = p;
    }
    let distribution = if amplitude_classes.is_empty() {
        SymbolDistribution::uniform(alphabet.size())
    } else {
        SymbolDistribution::new(probs)?
    };
    SymbolFrame::new(alphabet.clone(), distribution, indices)
}

fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random::<bool>() as u8).collect()
}

/// Generates a shaped frame of `n_symbols` symbols: CCDM blocks of
/// `block_length` amplitudes matched to the magnitude distribution of
/// `target`, with uniform sign bits.
pub fn shaped_frame(
    alphabet: &PamAlphabet,
    target: &SymbolDistribution,
    n_symbols: usize,
    block_length: usize,
    seed: Seed,
) -> Result<SymbolFrame> {
    if n_symbols == 0 || block_length == 0 {
        return Err(Error::param("frame and block lengths must be positive"));
    }
    if target.len() != alphabet.size() {
        return Err(Error::param(
            "target distribution does not match the alphabet",
        ));
    }
    let mag = target.magnitude_probabilities(alphabet);
    let mut data_rng = seed.derive(stream::DATA_BITS).rng();
    let mut sign_rng = seed.derive(stream::SIGN_BITS).rng();
    let mut classes = Vec::with_capacity(n_symbols);
    while classes.len() < n_symbols {
        let len = block_length.min(n_symbols - classes.len());
        let composition = Composition::from_probabilities(&mag, len)?;
        let bits = random_bits(&mut data_rng, ccdm_input_bits(&composition));
        classes.extend(ccdm_encode(&bits, &composition)?);
    }
    let signs = random_bits(&mut sign_rng, n_symbols);
    pas_assemble(&classes, &signs, alphabet)
}

/// Generates a frame of independent, uniformly distributed symbols.
pub fn uniform_frame(alphabet: &PamAlphabet, n_symbols: usize, seed: Seed) -> Result<SymbolFrame> {
    if n_symbols == 0 {
        return Err(Error::param("frame length must be positive"));
    }
    let mut rng = seed.derive(stream::DATA_BITS).rng();
    let m = alphabet.size();
    let indices = (0..n_symbols).map(|_| rng.random_range(0..m)).collect();
    SymbolFrame::new(alphabet.clone(), SymbolDistribution::uniform(m), indices)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pas_assemble_applies_signs() {
        let a = PamAlphabet::pam12();
        let f = pas_assemble(&[1, 1], &[0, 1], &a).unwrap();
        let lv = f.levels();
        assert!(lv[0] > 0.0 && (lv[0] + lv[1]).abs() < 1e-15);
        assert_eq!(lv[0], a.levels()[a.signed_index(1, false)]);
        let f = pas_assemble(&[0, 3, 5, 2], &[0, 0, 0, 0], &a).unwrap();
        assert!(f.levels().iter().all(|&x| x >= 0.0));
        assert!(pas_assemble(&[0, 1], &[0], &a).is_err());
    }

    #[test]
    fn frame_bits_follow_labels() {
        let a = PamAlphabet::pam8();
        let f = SymbolFrame::new(a.clone(), SymbolDistribution::uniform(8), vec![0, 7, 2]).unwrap();
        assert_eq!(f.bits(), vec![0, 0, 0, 1, 0, 0, 0, 1, 1]);
    }

    #[test]
    fn shaped_frame_tracks_target_distribution() {
        let a = PamAlphabet::pam12();
        let nu = nu_for_entropy(3.0, &a).unwrap();
        let target = maxwell_boltzmann(nu, &a).unwrap();
        let f = shaped_frame(&a, &target, 10_000, 10_000, Seed::from(3)).unwrap();
        let emp = SymbolDistribution::empirical(f.indices(), 12).unwrap();
        assert!(emp.total_variation(&target) < 0.02);
        // The prior is the symmetric composition distribution.
        let p = f.distribution().probabilities();
        for i in 0..6 {
            assert_eq!(p[i], p[11 - i]);
        }
    }

    #[test]
    fn shaped_frame_is_deterministic() {
        let a = PamAlphabet::pam12();
        let target = maxwell_boltzmann(0.2, &a).unwrap();
        let f1 = shaped_frame(&a, &target, 300, 128, Seed::from(9)).unwrap();
        let f2 = shaped_frame(&a, &target, 300, 128, Seed::from(9)).unwrap();
        assert_eq!(f1, f2);
        assert_ne!(
            f1,
            shaped_frame(&a, &target, 300, 128, Seed::from(10)).unwrap()
        );
    }
}
