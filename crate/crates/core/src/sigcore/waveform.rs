use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What physical quantity a waveform carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Voltage in the electrical transmitter or receiver (real-valued).
    Electrical,
    /// Complex envelope of the optical field, in sqrt(W).
    OpticalField,
    /// Photodiode output current (real-valued).
    Photocurrent,
}

impl Domain {
    pub fn is_real(self) -> bool {
        !matches!(self, Domain::OpticalField)
    }
}

/// Uniformly sampled signal with an explicit sample rate.
///
/// Samples are stored as complex numbers; electrical and photocurrent
/// waveforms always have a zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    sample_rate_hz: f64,
    samples: Vec<Complex64>,
    domain: Domain,
}

impl SampledWaveform {
    pub fn new(sample_rate_hz: f64, samples: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::param(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::param("waveform must contain at least one sample"));
        }
        if domain.is_real() {
            let rms = rms_of(&samples);
            let worst = samples.iter().fold(0.0f64, |m, s| m.max(s.im.abs()));
            if worst > 1e-12 * rms.max(f64::MIN_POSITIVE) {
                return Err(Error::param(format!(
                    "{domain:?} waveform has imaginary part {worst:.3e} (rms {rms:.3e})"
                )));
            }
        }
        Ok(SampledWaveform {
            sample_rate_hz,
            samples,
            domain,
        })
    }

    pub fn from_real(sample_rate_hz: f64, samples: &[f64], domain: Domain) -> Result<Self> {
        Self::new(
            sample_rate_hz,
            samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            domain,
        )
    }

    /// Replaces the samples, keeping rate and domain. Real-valued domains are
    /// projected onto the real axis.
    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        self.retag(samples, self.domain)
    }

    pub(crate) fn retag(&self, mut samples: Vec<Complex64>, domain: Domain) -> Self {
        debug_assert!(!samples.is_empty());
        if domain.is_real() {
            samples.iter_mut().for_each(|s| s.im = 0.0);
        }
        SampledWaveform {
            sample_rate_hz: self.sample_rate_hz,
            samples,
            domain,
        }
    }

    pub(crate) fn with_rate(mut self, sample_rate_hz: f64) -> Self {
        self.sample_rate_hz = sample_rate_hz;
        self
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.re).collect()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn mean_power(&self) -> f64 {
        self.energy() / self.samples.len() as f64
    }

    pub fn rms(&self) -> f64 {
        rms_of(&self.samples)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.with_samples(self.samples.iter().map(|s| s * factor).collect())
    }

    /// Sample-wise sum of two waveforms with matching rate and length.
    pub fn try_add(&self, other: &SampledWaveform) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub(crate) fn check_compatible(&self, other: &SampledWaveform) -> Result<()> {
        if (self.sample_rate_hz - other.sample_rate_hz).abs() > 1e-9 * self.sample_rate_hz {
            return Err(Error::param(format!(
                "sample rate mismatch: {} Hz vs {} Hz",
                self.sample_rate_hz, other.sample_rate_hz
            )));
        }
        if self.len() != other.len() {
            return Err(Error::param(format!(
                "length mismatch: {} vs {} samples",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }
}

fn rms_of(samples: &[Complex64]) -> f64 {
    (samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len().max(1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_construction() {
        assert!(SampledWaveform::from_real(0.0, &[1.0], Domain::Electrical).is_err());
        assert!(SampledWaveform::from_real(1.0, &[], Domain::Electrical).is_err());
        let complex = vec![Complex64::new(1.0, 0.5)];
        assert!(SampledWaveform::new(1.0, complex.clone(), Domain::Electrical).is_err());
        assert!(SampledWaveform::new(1.0, complex, Domain::OpticalField).is_ok());
    }

    #[test]
    fn add_requires_matching_shape() {
        let a = SampledWaveform::from_real(2.0, &[1.0, 2.0], Domain::Electrical).unwrap();
        let b = SampledWaveform::from_real(2.0, &[3.0, 4.0], Domain::Electrical).unwrap();
        assert_eq!(a.try_add(&b).unwrap().real_parts(), vec![4.0, 6.0]);
        let c = SampledWaveform::from_real(3.0, &[3.0, 4.0], Domain::Electrical).unwrap();
        assert!(a.try_add(&c).is_err());
    }
}
