use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{analog_lowpass, default_analog_shape};
use crate::error::{Error, Result};
use crate::sigcore::spectrum::{self, bin_frequency};
use crate::sigcore::{resample, FilterShape, SampledWaveform};

/// Arbitrary waveform generator channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DacModel {
    pub sample_rate_hz: f64,
    /// 3-dB analog bandwidth; `None` is unlimited.
    pub bandwidth_hz: Option<f64>,
    #[serde(default = "default_analog_shape")]
    pub bandwidth_shape: FilterShape,
    /// Apply zero-order-hold reconstruction (sinc droop and images).
    pub zero_order_hold: bool,
    pub resolution_bits: Option<u32>,
    /// Quantizer full scale (peak); `None` uses the record's peak.
    pub full_scale: Option<f64>,
}

impl Default for DacModel {
    fn default() -> Self {
        DacModel {
            sample_rate_hz: 256e9,
            bandwidth_hz: Some(80e9),
            bandwidth_shape: default_analog_shape(),
            zero_order_hold: true,
            resolution_bits: None,
            full_scale: None,
        }
    }
}

impl DacModel {
    /// Unlimited bandwidth, no hold, no quantization.
    pub fn ideal(sample_rate_hz: f64) -> Self {
        DacModel {
            sample_rate_hz,
            bandwidth_hz: None,
            zero_order_hold: false,
            ..Self::default()
        }
    }

    /// Small-signal response from the AWG samples to the analog output,
    /// evaluated for processing at `sample_rate_hz`.
    pub fn response(&self, f: f64, sample_rate_hz: f64) -> Complex64 {
        let hold = if self.zero_order_hold {
            sinc(f / self.sample_rate_hz)
        } else {
            1.0
        };
        let bw = self
            .bandwidth_hz
            .map(|b| analog_lowpass(b, self.bandwidth_shape).response_at(f, sample_rate_hz))
            .unwrap_or(Complex64::new(1.0, 0.0));
        bw * hold
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Uniform mid-rise quantizer with `2^bits` levels over `[-full_scale,
/// full_scale]`.
pub fn quantize(samples: &[f64], bits: u32, full_scale: f64) -> Vec<f64> {
    let levels = 2f64.powi(bits as i32);
    let step = 2.0 * full_scale / levels;
    samples
        .iter()
        .map(|&x| {
            let idx = ((x + full_scale) / step).floor().clamp(0.0, levels - 1.0);
            -full_scale + (idx + 0.5) * step
        })
        .collect()
}

/// Converts AWG samples to the analog waveform at `output_rate_hz`.
///
/// With zero-order hold the samples are zero-stuffed to the output rate and
/// shaped by the hold's `sinc(f / f_awg)` response (its half-sample delay is
/// removed), so hold images up to the output Nyquist frequency remain until
/// the bandwidth filter. The output rate must then be an integer multiple of
/// the AWG rate.
pub fn dac(
    wave: &SampledWaveform,
    model: &DacModel,
    output_rate_hz: f64,
) -> Result<SampledWaveform> {
    let fs = model.sample_rate_hz;
    if (wave.sample_rate_hz() - fs).abs() > 1e-9 * fs {
        return Err(Error::param(format!(
            "DAC expects samples at {fs:.4e} Sa/s, got {:.4e}",
            wave.sample_rate_hz()
        )));
    }
    if !wave.domain().is_real() {
        return Err(Error::param("DAC input must be real-valued"));
    }
    let mut x = wave.real_parts();
    if let Some(bits) = model.resolution_bits {
        if !(1..=24).contains(&bits) {
            return Err(Error::param(format!(
                "DAC resolution {bits} bits outside 1..=24"
            )));
        }
        let fsc = model
            .full_scale
            .unwrap_or_else(|| x.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        if fsc > 0.0 {
            x = quantize(&x, bits, fsc);
        }
    }
    let quantized = SampledWaveform::from_real(fs, &x, wave.domain())?;
    let analog = if model.zero_order_hold {
        let ratio = output_rate_hz / fs;
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio {
            return Err(Error::param(format!(
                "zero-order hold needs an integer rate ratio, got {ratio}"
            )));
        }
        let k = k as usize;
        let mut stuffed = vec![Complex64::new(0.0, 0.0); x.len() * k];
        for (i, v) in x.iter().enumerate() {
            stuffed[i * k] = Complex64::new(v * k as f64, 0.0);
        }
        let n = stuffed.len();
        let mut spec = spectrum::fft(&stuffed);
        for (i, bin) in spec.iter_mut().enumerate() {
            *bin *= sinc(bin_frequency(i, n, output_rate_hz) / fs);
        }
        SampledWaveform::from_real(
            output_rate_hz,
            &spectrum::ifft(&spec)
                .iter()
                .map(|v| v.re)
                .collect::<Vec<_>>(),
            wave.domain(),
        )?
    } else {
        resample(&quantized, output_rate_hz)?
    };
    match model.bandwidth_hz {
        Some(b) => crate::sigcore::apply_filter(&analog, &analog_lowpass(b, model.bandwidth_shape)),
        None => Ok(analog),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use crate::sigcore::Domain;
    use rand::Rng;
    use std::f64::consts::PI;

    fn cosine(n: usize, fs: f64, f: f64) -> SampledWaveform {
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * f * i as f64 / fs).cos())
            .collect();
        SampledWaveform::from_real(fs, &x, Domain::Electrical).unwrap()
    }

    fn hold_only() -> DacModel {
        DacModel {
            bandwidth_hz: None,
            ..DacModel::default()
        }
    }

    #[test]
    fn dc_passes_unchanged() {
        let w = SampledWaveform::from_real(256e9, &[0.3; 64], Domain::Electrical).unwrap();
        let out = dac(&w, &DacModel::default(), 512e9).unwrap();
        assert_eq!(out.len(), 128);
        for s in out.samples() {
            assert!((s.re - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn hold_droop_at_64_ghz() {
        let out = dac(&cosine(1024, 256e9, 64e9), &hold_only(), 512e9).unwrap();
        let droop_db = 20.0 * spectrum::tone(&out, 64e9).norm().log10();
        let expected = 20.0 * sinc(0.25).log10();
        assert!((expected + 0.91).abs() < 0.01);
        assert!((droop_db - expected).abs() < 0.1, "{droop_db}");
        // The first hold image sits at 256 - 64 GHz.
        let image = spectrum::tone(&out, 192e9).norm();
        assert!((image - sinc(0.75)).abs() < 1e-9);
    }

    #[test]
    fn ideal_dac_is_bandlimited_interpolation() {
        let out = dac(&cosine(512, 256e9, 40e9), &DacModel::ideal(256e9), 512e9).unwrap();
        let reference = cosine(1024, 512e9, 40e9);
        assert!(crate::sigcore::nmse_db(&reference, &out).unwrap() <= -150.0);
    }

    #[test]
    fn quantization_noise_follows_the_6db_rule() {
        let mut rng = Seed::from(11).rng();
        let x: Vec<f64> = (0..100_000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let q = quantize(&x, 8, 1.0);
        let noise: f64 =
            x.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / x.len() as f64;
        let signal: f64 = x.iter().map(|a| a * a).sum::<f64>() / x.len() as f64;
        let snr = 10.0 * (signal / noise).log10();
        assert!((snr - (6.02 * 8.0 + 1.76)).abs() <= 3.0, "{snr} dB");
    }

    #[test]
    fn rejects_wrong_input_rate() {
        let w = cosine(64, 200e9, 10e9);
        assert!(dac(&w, &DacModel::default(), 512e9).is_err());
    }
}
