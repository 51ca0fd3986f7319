use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary-reflected Gray code of `i`.
pub fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

/// Ordered PAM amplitude levels with an injective bit labeling.
///
/// Labels are read most-significant bit first. For symmetric alphabets whose
/// size is not a power of two (PAM12) the labeling is sign-magnitude: the
/// leading bit is the sign (0 = positive) and the remaining bits are the Gray
/// code of the magnitude class, so adjacent levels differ in exactly one bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PamAlphabet {
    levels: Vec<f64>,
    labels: Vec<u32>,
    label_bits: usize,
}

impl PamAlphabet {
    pub fn new(levels: Vec<f64>, labels: Vec<u32>, label_bits: usize) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::param("an alphabet needs at least two levels"));
        }
        if levels.len() != labels.len() {
            return Err(Error::param("every level needs exactly one label"));
        }
        if levels.windows(2).any(|w| !(w[1] > w[0])) || levels.iter().any(|l| !l.is_finite()) {
            return Err(Error::param(
                "levels must be finite and strictly increasing",
            ));
        }
        if label_bits == 0 || label_bits > 16 || (1usize << label_bits) < levels.len() {
            return Err(Error::param(format!(
                "{label_bits} label bits cannot index {} levels",
                levels.len()
            )));
        }
        let mut seen = vec![false; 1 << label_bits];
        for &l in &labels {
            let slot = seen.get_mut(l as usize).ok_or_else(|| {
                Error::param(format!("label {l} needs more than {label_bits} bits"))
            })?;
            if *slot {
                return Err(Error::param(format!("label {l} used twice")));
            }
            *slot = true;
        }
        Ok(PamAlphabet {
            levels,
            labels,
            label_bits,
        })
    }

    /// Alphabet over the given levels with the default labeling: Gray code of
    /// the level index for power-of-two sizes, sign-magnitude Gray otherwise.
    pub fn with_default_labels(levels: Vec<f64>) -> Result<Self> {
        let m = levels.len();
        if m.is_power_of_two() {
            let bits = m.trailing_zeros() as usize;
            let labels = (0..m as u32).map(gray).collect();
            return Self::new(levels, labels, bits);
        }
        if !m.is_multiple_of(2) {
            return Err(Error::param(format!(
                "no default labeling for odd size {m}"
            )));
        }
        let half = m / 2;
        let mag_bits = half.next_power_of_two().trailing_zeros() as usize;
        let labels = (0..m)
            .map(|i| {
                let (negative, class) = if i < half {
                    (1u32, half - 1 - i)
                } else {
                    (0u32, i - half)
                };
                (negative << mag_bits) | gray(class as u32)
            })
            .collect();
        Self::new(levels, labels, 1 + mag_bits)
    }

    /// PAM-`m` on levels `±1, ±3, …, ±(m−1)` scaled to unit mean power under
    /// the uniform distribution.
    pub fn pam(m: usize) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::param(format!(
                "PAM size must be even and >= 2, got {m}"
            )));
        }
        let raw: Vec<f64> = (0..m).map(|i| 2.0 * i as f64 - (m as f64 - 1.0)).collect();
        let power = raw.iter().map(|a| a * a).sum::<f64>() / m as f64;
        let scale = power.sqrt().recip();
        Self::with_default_labels(raw.iter().map(|a| a * scale).collect())
    }

    pub fn pam12() -> Self {
        Self::pam(12).expect("PAM12 is valid")
    }

    pub fn pam8() -> Self {
        Self::pam(8).expect("PAM8 is valid")
    }

    pub fn size(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_bits(&self) -> usize {
        self.label_bits
    }

    pub fn label(&self, index: usize) -> u32 {
        self.labels[index]
    }

    /// Bit `bit` (0 = most significant) of the label of level `index`.
    pub fn label_bit(&self, index: usize, bit: usize) -> u8 {
        ((self.labels[index] >> (self.label_bits - 1 - bit)) & 1) as u8
    }

    /// Level index carrying `label`, if any.
    pub fn index_of_label(&self, label: u32) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn is_symmetric(&self) -> bool {
        let m = self.levels.len();
        m.is_multiple_of(2)
            && (0..m / 2).all(|i| {
                let (a, b) = (self.levels[i], self.levels[m - 1 - i]);
                (a + b).abs() <= 1e-12 * b.abs().max(1.0)
            })
    }

    /// Number of magnitude classes (`M/2`) of a symmetric alphabet.
    pub fn magnitude_classes(&self) -> usize {
        self.levels.len() / 2
    }

    /// Level index for magnitude class `class` (0 = smallest) and sign.
    pub fn signed_index(&self, class: usize, negative: bool) -> usize {
        let half = self.levels.len() / 2;
        if negative {
            half - 1 - class
        } else {
            half + class
        }
    }

    /// Magnitude class of level `index` in a symmetric alphabet.
    pub fn class_of(&self, index: usize) -> usize {
        let half = self.levels.len() / 2;
        if index < half {
            half - 1 - index
        } else {
            index - half
        }
    }

    /// Same labeling with every level multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::param("alphabet scale factor must be positive"));
        }
        Self::new(
            self.levels.iter().map(|l| l * factor).collect(),
            self.labels.clone(),
            self.label_bits,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pam12_is_symmetric_unit_power_with_sign_magnitude_labels() {
        let a = PamAlphabet::pam12();
        assert_eq!(a.size(), 12);
        assert_eq!(a.label_bits(), 4);
        assert!(a.is_symmetric());
        let p = a.levels().iter().map(|l| l * l).sum::<f64>() / 12.0;
        assert!((p - 1.0).abs() < 1e-12);
        // +a0 carries sign bit 0, -a0 sign bit 1, same magnitude bits.
        assert_eq!(a.label(a.signed_index(0, false)), 0b0000);
        assert_eq!(a.label(a.signed_index(0, true)), 0b1000);
        // The 6 magnitudes use the first 6 Gray codes.
        let mags: Vec<u32> = (0..6).map(|c| a.label(a.signed_index(c, false))).collect();
        assert_eq!(mags, vec![0, 1, 3, 2, 6, 7]);
    }

    #[test]
    fn adjacent_levels_differ_in_one_bit() {
        for a in [
            PamAlphabet::pam12(),
            PamAlphabet::pam8(),
            PamAlphabet::pam(4).unwrap(),
        ] {
            for i in 1..a.size() {
                assert_eq!((a.label(i) ^ a.label(i - 1)).count_ones(), 1);
            }
        }
    }

    #[test]
    fn pam8_uses_three_bit_gray() {
        let a = PamAlphabet::pam8();
        assert_eq!(a.label_bits(), 3);
        assert_eq!(a.labels(), &[0, 1, 3, 2, 6, 7, 5, 4]);
    }

    #[test]
    fn rejects_invalid_alphabets() {
        assert!(PamAlphabet::new(vec![1.0, 0.0], vec![0, 1], 1).is_err());
        assert!(PamAlphabet::new(vec![0.0, 1.0], vec![0, 0], 1).is_err());
        assert!(PamAlphabet::new(vec![0.0, 1.0, 2.0], vec![0, 1, 2], 1).is_err());
        assert!(PamAlphabet::pam(7).is_err());
    }
}
