use serde::{Deserialize, Serialize};

use super::PamAlphabet;
use crate::error::{Error, Result};

/// Probability mass function over the levels of a [`PamAlphabet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolDistribution {
    probabilities: Vec<f64>,
}

impl SymbolDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() || probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::param(
                "probabilities must be finite and non-negative",
            ));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(SymbolDistribution { probabilities })
    }

    pub fn uniform(size: usize) -> Self {
        SymbolDistribution {
            probabilities: vec![1.0 / size as f64; size],
        }
    }

    /// Normalized histogram of `indices` over `size` levels.
    pub fn empirical(indices: &[usize], size: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::param("empirical distribution of an empty sequence"));
        }
        let mut counts = vec![0usize; size];
        for &i in indices {
            *counts
                .get_mut(i)
                .ok_or_else(|| Error::param(format!("level index {i} out of range")))? += 1;
        }
        let n = indices.len() as f64;
        Ok(SymbolDistribution {
            probabilities: counts.iter().map(|&c| c as f64 / n).collect(),
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Total-variation distance `½ Σ |p − q|`.
    pub fn total_variation(&self, other: &SymbolDistribution) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }

    /// Probabilities of the magnitude classes of a symmetric alphabet
    /// (`P(|a_c|) = P(a_c) + P(−a_c)`).
    pub fn magnitude_probabilities(&self, alphabet: &PamAlphabet) -> Vec<f64> {
        (0..alphabet.magnitude_classes())
            .map(|c| {
                self.probabilities[alphabet.signed_index(c, false)]
                    + self.probabilities[alphabet.signed_index(c, true)]
            })
            .collect()
    }
}

/// Maxwell-Boltzmann distribution `P(a) ∝ exp(−ν a²)` over the alphabet.
pub fn maxwell_boltzmann(nu: f64, alphabet: &PamAlphabet) -> Result<SymbolDistribution> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::param(format!(
            "shaping parameter must be finite and >= 0, got {nu}"
        )));
    }
    let min_sq = alphabet
        .levels()
        .iter()
        .map(|a| a * a)
        .fold(f64::INFINITY, f64::min);
    // Offsetting by the smallest energy keeps the largest weight at 1.
    let weights: Vec<f64> = alphabet
        .levels()
        .iter()
        .map(|a| (-nu * (a * a - min_sq)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    Ok(SymbolDistribution {
        probabilities: weights.iter().map(|w| w / z).collect(),
    })
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy_bits(dist: &SymbolDistribution) -> f64 {
    entropy_of(dist.probabilities())
}

pub(crate) fn entropy_of(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// Tolerance on the entropy reached by [`nu_for_entropy`].
pub const ENTROPY_TOLERANCE_BITS: f64 = 1e-6;

/// Finds `ν` such that the Maxwell-Boltzmann distribution on `alphabet` has
/// the target entropy, by bisection (entropy is strictly decreasing in ν).
pub fn nu_for_entropy(target_bits: f64, alphabet: &PamAlphabet) -> Result<f64> {
    let h_max = (alphabet.size() as f64).log2();
    // Targets written as log2(M) rounded to three decimals mean uniform.
    if target_bits > h_max && target_bits <= h_max + 5e-4 {
        return Ok(0.0);
    }
    if !(target_bits > 0.0 && target_bits <= h_max + 1e-12) {
        return Err(Error::param(format!(
            "target entropy {target_bits} outside (0, {h_max:.6}]"
        )));
    }
    let h = |nu: f64| entropy_bits(&maxwell_boltzmann(nu, alphabet).expect("nu >= 0"));
    // As nu grows the mass settles on the minimum-energy levels.
    let min_sq = alphabet
        .levels()
        .iter()
        .map(|a| a * a)
        .fold(f64::INFINITY, f64::min);
    let ground = alphabet
        .levels()
        .iter()
        .filter(|a| (*a * *a - min_sq).abs() <= 1e-12 * min_sq.max(1.0))
        .count();
    let h_min = (ground as f64).log2();
    if target_bits < h_min - ENTROPY_TOLERANCE_BITS {
        return Err(Error::param(format!(
            "target entropy {target_bits} below the attainable minimum {h_min}"
        )));
    }
    if h_max - target_bits <= 0.1 * ENTROPY_TOLERANCE_BITS {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while h(hi) > target_bits {
        if (h(hi) - target_bits).abs() <= 0.1 * ENTROPY_TOLERANCE_BITS {
            return Ok(hi);
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numerical(format!(
                "could not bracket entropy {target_bits}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let hm = h(mid);
        if (hm - target_bits).abs() <= 0.01 * ENTROPY_TOLERANCE_BITS {
            return Ok(mid);
        }
        if hm > target_bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
