//! Constant composition distribution matching.
//!
//! A block of input bits is read as an integer index and mapped to the
//! permutation of a fixed multiset ("composition") with that rank in
//! lexicographic order. Encoding subdivides the index interval symbol by
//! symbol, exactly as an arithmetic coder with infinite precision would;
//! decoding accumulates the rank back. All interval arithmetic uses
//! arbitrary-precision integers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Occurrence counts of each amplitude class in a CCDM block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Composition {
    counts: Vec<usize>,
}

impl Composition {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.iter().sum::<usize>() == 0 {
            return Err(Error::param("composition must contain at least one symbol"));
        }
        Ok(Composition { counts })
    }

    /// Rounds `n · P` to integer counts summing to `n` by the largest
    /// remainder method. Ties go to the lower class index.
    pub fn from_probabilities(probabilities: &[f64], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("block length must be positive"));
        }
        let total: f64 = probabilities.iter().sum();
        if probabilities.is_empty() || !(total > 0.0) || probabilities.iter().any(|p| !(*p >= 0.0))
        {
            return Err(Error::param(
                "composition target must be a non-negative distribution",
            ));
        }
        let ideal: Vec<f64> = probabilities.iter().map(|p| p / total * n as f64).collect();
        let mut counts: Vec<usize> = ideal.iter().map(|x| x.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = ideal[a] - ideal[a].floor();
            let rb = ideal[b] - ideal[b].floor();
            rb.partial_cmp(&ra)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for &i in order.iter().take(n - assigned) {
            counts[i] += 1;
        }
        Composition::new(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn block_length(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Empirical distribution `counts / n`.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.block_length() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Number of distinct sequences with this composition,
    /// `n! / Π counts!`.
    pub fn multinomial(&self) -> BigUint {
        let mut total = BigUint::one();
        let mut placed = 0usize;
        for &k in &self.counts {
            // Multiply by C(placed + k, k) incrementally; every step is exact.
            for i in 1..=k {
                total *= placed + i;
                total /= i;
            }
            placed += k;
        }
        total
    }
}

/// Number of input bits consumed per block, `⌊log2 multinomial⌋`.
pub fn ccdm_input_bits(composition: &Composition) -> usize {
    (composition.multinomial().bits() - 1) as usize
}

/// Matcher rate `⌊log2 multinomial⌋ / n` in bits per symbol.
pub fn ccdm_rate_bits_per_symbol(composition: &Composition) -> f64 {
    ccdm_input_bits(composition) as f64 / composition.block_length() as f64
}

fn bits_to_index(bits: &[u8]) -> Result<BigUint> {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    let pad = bytes.len() * 8 - bits.len();
    for (i, &b) in bits.iter().enumerate() {
        match b {
            0 => {}
            1 => {
                let pos = pad + i;
                bytes[pos / 8] |= 0x80 >> (pos % 8);
            }
            _ => return Err(Error::param(format!("bit value {b} is not 0 or 1"))),
        }
    }
    Ok(BigUint::from_bytes_be(&bytes))
}

fn index_to_bits(index: &BigUint, width: usize) -> Vec<u8> {
    (0..width)
        .map(|i| index.bit((width - 1 - i) as u64) as u8)
        .collect()
}

/// Maps `data_bits` (most significant first) to the amplitude-class sequence
/// of the given composition whose lexicographic rank equals the bits' value.
pub fn ccdm_encode(data_bits: &[u8], composition: &Composition) -> Result<Vec<usize>> {
    let width = ccdm_input_bits(composition);
    if data_bits.len() != width {
        return Err(Error::param(format!(
            "CCDM block expects {width} input bits, got {}",
            data_bits.len()
        )));
    }
    let mut index = bits_to_index(data_bits)?;
    let mut remaining = composition.counts.clone();
    let mut n_rem = composition.block_length();
    let mut total = composition.multinomial();
    let mut out = Vec::with_capacity(n_rem);
    while n_rem > 0 {
        // The class whose sub-interval holds `index` satisfies
        // K_c <= floor(index · n_rem / total) < K_c + k_c.
        let q = (&index * n_rem / &total)
            .to_usize()
            .ok_or_else(|| Error::Numerical("interval index overflow".into()))?;
        let mut below = 0usize;
        let mut class = usize::MAX;
        for (c, &k) in remaining.iter().enumerate() {
            if k > 0 && q < below + k {
                class = c;
                break;
            }
            below += k;
        }
        if class == usize::MAX {
            return Err(Error::Numerical(
                "interval subdivision ran past the last class".into(),
            ));
        }
        if below > 0 {
            index -= &total * below / n_rem;
        }
        total = &total * remaining[class] / n_rem;
        remaining[class] -= 1;
        n_rem -= 1;
        out.push(class);
    }
    Ok(out)
}

/// Inverse of [`ccdm_encode`]. Fails if `symbols` does not have exactly the
/// given composition or is not the image of any input block.
pub fn ccdm_decode(symbols: &[usize], composition: &Composition) -> Result<Vec<u8>> {
    if symbols.len() != composition.block_length() {
        return Err(Error::Decode(format!(
            "block has {} symbols, composition expects {}",
            symbols.len(),
            composition.block_length()
        )));
    }
    let width = ccdm_input_bits(composition);
    let mut remaining = composition.counts.clone();
    let mut n_rem = composition.block_length();
    let mut total = composition.multinomial();
    let mut index = BigUint::zero();
    for &class in symbols {
        let k = *remaining
            .get(class)
            .ok_or_else(|| Error::Decode(format!("class {class} outside the composition")))?;
        if k == 0 {
            return Err(Error::Decode(format!(
                "class {class} occurs more often than its composition allows"
            )));
        }
        let below: usize = remaining[..class].iter().sum();
        if below > 0 {
            index += &total * below / n_rem;
        }
        total = &total * k / n_rem;
        remaining[class] -= 1;
        n_rem -= 1;
    }
    if index.bits() as usize > width {
        return Err(Error::Decode(
            "sequence is not a codeword of this matcher".into(),
        ));
    }
    Ok(index_to_bits(&index, width))
}
