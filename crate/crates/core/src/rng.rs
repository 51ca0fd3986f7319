//! Seeded pseudo-random number generation.
//!
//! Every stochastic stage takes a [`Seed`], which names both the seed value
//! and the generator family. The default family is the 64-bit Mersenne
//! Twister; ChaCha20 is available as an alternative. Generator names are
//! versioned and recorded in run manifests so a run can be reproduced
//! bit-exactly.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_mt::Mt64;
use serde::{Deserialize, Serialize};

/// Pseudo-random generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// MT19937-64 (`rand_mt` 5.x), seeded with the 64-bit seed value.
    #[default]
    Mt19937_64,
    /// ChaCha20 (`rand_chacha` 0.9), seeded via `seed_from_u64`.
    ChaCha20,
}

impl Generator {
    /// Versioned identifier written into run manifests.
    pub fn versioned_name(self) -> &'static str {
        match self {
            Generator::Mt19937_64 => "mt19937-64/rand_mt-5",
            Generator::ChaCha20 => "chacha20/rand_chacha-0.9",
        }
    }
}

/// A seed value together with the generator family it drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub value: u64,
    #[serde(default)]
    pub generator: Generator,
}

impl Seed {
    pub fn new(value: u64, generator: Generator) -> Self {
        Seed { value, generator }
    }

    /// Derives an independent sub-seed for a named stream.
    ///
    /// Streams are separated by hashing the stream id into the seed with a
    /// SplitMix64 finalizer, so `derive(a) != derive(b)` for `a != b` with
    /// overwhelming probability.
    pub fn derive(self, stream: u64) -> Seed {
        let mixed = splitmix64(self.value ^ splitmix64(stream.wrapping_add(0x5851_f42d_4c95_7f2d)));
        Seed {
            value: mixed,
            generator: self.generator,
        }
    }

    pub fn rng(self) -> SimRng {
        match self.generator {
            Generator::Mt19937_64 => SimRng::Mt(Box::new(Mt64::new(self.value))),
            Generator::ChaCha20 => SimRng::ChaCha(Box::new(ChaCha20Rng::seed_from_u64(self.value))),
        }
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed {
            value,
            generator: Generator::default(),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator instance produced by [`Seed::rng`].
pub enum SimRng {
    Mt(Box<Mt64>),
    ChaCha(Box<ChaCha20Rng>),
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        match self {
            SimRng::Mt(r) => r.next_u32(),
            SimRng::ChaCha(r) => r.next_u32(),
        }
    }

    fn next_u64(&mut self) -> u64 {
        match self {
            SimRng::Mt(r) => r.next_u64(),
            SimRng::ChaCha(r) => r.next_u64(),
        }
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        match self {
            SimRng::Mt(r) => r.fill_bytes(dest),
            SimRng::ChaCha(r) => r.fill_bytes(dest),
        }
    }
}

/// Stream identifiers used by the link simulation.
pub(crate) mod stream {
    pub const DATA_BITS: u64 = 1;
    pub const SIGN_BITS: u64 = 2;
    pub const DPD_TRAINING: u64 = 3;
    pub const RIN: u64 = 4;
    pub const ASE: u64 = 5;
    pub const THERMAL: u64 = 6;
    pub const DIGITIZER: u64 = 7;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_stream() {
        for generator in [Generator::Mt19937_64, Generator::ChaCha20] {
            let seed = Seed::new(42, generator);
            let a: Vec<u64> = (0..16)
                .map(|_| 0)
                .scan(seed.rng(), |r, _: u64| Some(r.random()))
                .collect();
            let b: Vec<u64> = (0..16)
                .map(|_| 0)
                .scan(seed.rng(), |r, _: u64| Some(r.random()))
                .collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mt64_matches_reference_output() {
        // First output of MT19937-64 seeded with 5489 (reference implementation).
        let mut rng = Seed::new(5489, Generator::Mt19937_64).rng();
        assert_eq!(rng.next_u64(), 14514284786278117030);
    }

    #[test]
    fn derived_streams_differ() {
        let s = Seed::from(7);
        assert_ne!(s.derive(1).value, s.derive(2).value);
        assert_eq!(s.derive(1), s.derive(1));
        assert_eq!(s.derive(1).generator, s.generator);
    }
}
