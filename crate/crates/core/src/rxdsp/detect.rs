use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::quantize;
use crate::rng::{stream, Seed};
use crate::sigcore::{apply_filter, resample, Domain, FilterShape, FilterSpec, SampledWaveform};

fn default_rx_shape() -> FilterShape {
    FilterShape::Butterworth { order: 2 }
}

/// PIN photodiode with a transimpedance front end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotodiodeModel {
    /// 3-dB bandwidth; `None` is unlimited.
    pub bandwidth_hz: Option<f64>,
    #[serde(default = "default_rx_shape")]
    pub bandwidth_shape: FilterShape,
    pub responsivity_a_w: f64,
    /// One-sided thermal noise current density in A²/Hz.
    pub thermal_noise_a2_hz: f64,
}

impl Default for PhotodiodeModel {
    fn default() -> Self {
        PhotodiodeModel {
            bandwidth_hz: Some(100e9),
            bandwidth_shape: default_rx_shape(),
            responsivity_a_w: 0.6,
            thermal_noise_a2_hz: 0.0,
        }
    }
}

/// Square-law detection `i = R |E|²`, additive thermal noise over the
/// simulation bandwidth, then the photodiode bandwidth.
pub fn photodetect(
    field: &SampledWaveform,
    model: &PhotodiodeModel,
    seed: Seed,
) -> Result<SampledWaveform> {
    if field.domain() != Domain::OpticalField {
        return Err(Error::param("photodetection needs an optical field"));
    }
    if !(model.responsivity_a_w > 0.0) || !(model.thermal_noise_a2_hz >= 0.0) {
        return Err(Error::param(
            "responsivity must be positive and noise density >= 0",
        ));
    }
    let r = model.responsivity_a_w;
    let mut current: Vec<f64> = field.samples().iter().map(|e| r * e.norm_sqr()).collect();
    if model.thermal_noise_a2_hz > 0.0 {
        let sigma = (model.thermal_noise_a2_hz * field.sample_rate_hz() / 2.0).sqrt();
        let mut rng = seed.derive(stream::THERMAL).rng();
        for c in current.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *c += sigma * z;
        }
    }
    let out = SampledWaveform::from_real(field.sample_rate_hz(), &current, Domain::Photocurrent)?;
    match model.bandwidth_hz {
        Some(b) => apply_filter(&out, &FilterSpec::lowpass(b, model.bandwidth_shape)),
        None => Ok(out),
    }
}

/// Real-time oscilloscope channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitizerModel {
    pub sample_rate_hz: f64,
    pub bandwidth_hz: Option<f64>,
    #[serde(default = "default_rx_shape")]
    pub bandwidth_shape: FilterShape,
    pub resolution_bits: Option<u32>,
    /// Quantizer full scale (peak); `None` uses the record's peak.
    #[serde(default)]
    pub full_scale: Option<f64>,
    /// RMS input-referred noise relative to the AC RMS of the record.
    #[serde(default)]
    pub relative_noise_rms: f64,
}

impl Default for DigitizerModel {
    fn default() -> Self {
        DigitizerModel {
            sample_rate_hz: 256e9,
            bandwidth_hz: Some(113e9),
            bandwidth_shape: default_rx_shape(),
            resolution_bits: None,
            full_scale: None,
            relative_noise_rms: 0.0,
        }
    }
}

/// Bandwidth filter, resampling to the digitizer rate, optional noise and
/// quantization.
pub fn digitize(
    wave: &SampledWaveform,
    model: &DigitizerModel,
    seed: Seed,
) -> Result<SampledWaveform> {
    if !wave.domain().is_real() {
        return Err(Error::param("digitizer input must be real-valued"));
    }
    let filtered = match model.bandwidth_hz {
        Some(b) => apply_filter(wave, &FilterSpec::lowpass(b, model.bandwidth_shape))?,
        None => wave.clone(),
    };
    let sampled = resample(&filtered, model.sample_rate_hz)?;
    let mut x = sampled.real_parts();
    if model.relative_noise_rms > 0.0 {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let ac_rms = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
        let sigma = model.relative_noise_rms * ac_rms;
        let mut rng = seed.derive(stream::DIGITIZER).rng();
        for v in x.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += sigma * z;
        }
    }
    if let Some(bits) = model.resolution_bits {
        if !(1..=24).contains(&bits) {
            return Err(Error::param(format!(
                "digitizer resolution {bits} bits outside 1..=24"
            )));
        }
        // Center the quantizer on the record mean so the photocurrent DC
        // does not eat into the range.
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
        let fsc = model
            .full_scale
            .unwrap_or_else(|| centered.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        if fsc > 0.0 {
            x = quantize(&centered, bits, fsc)
                .iter()
                .map(|v| v + mean)
                .collect();
        }
    }
    Ok(sampled.with_samples(x.into_iter().map(|v| Complex64::new(v, 0.0)).collect()))
}
