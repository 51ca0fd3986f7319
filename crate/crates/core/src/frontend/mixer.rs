use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigcore::spectrum;
use crate::sigcore::{FilterShape, FilterSpec, ResponseTable, SampledWaveform};

/// IF energy above the LO that is rejected outright.
const IF_ALIAS_ERROR_FRACTION: f64 = 1e-2;
/// IF energy above the LO that triggers a warning. The presets sit near -36 dB.
const IF_ALIAS_WARN_FRACTION: f64 = 1e-3;

/// Spurious tone injected at the mixer output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spur {
    pub frequency_hz: f64,
    /// Amplitude relative to a unit-amplitude tone.
    pub level_db: f64,
}

/// Up-converting mixer driven by an ideal LO.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixerModel {
    pub lo_frequency_hz: f64,
    /// 3-dB bandwidth of the conversion gain (2nd-order magnitude rolloff);
    /// `None` is flat.
    pub gain_bandwidth_hz: Option<f64>,
    /// Explicit conversion-gain table over RF output frequency; overrides
    /// `gain_bandwidth_hz`.
    #[serde(default)]
    pub gain_table: Option<ResponseTable>,
    /// LO feedthrough relative to a unit-amplitude tone.
    pub lo_leakage_db: Option<f64>,
    /// IF feedthrough relative to the IF signal.
    pub if_leakage_db: Option<f64>,
    #[serde(default)]
    pub spurs: Vec<Spur>,
}

impl MixerModel {
    pub fn new(lo_frequency_hz: f64) -> Self {
        MixerModel {
            lo_frequency_hz,
            gain_bandwidth_hz: Some(150e9),
            gain_table: None,
            lo_leakage_db: None,
            if_leakage_db: None,
            spurs: Vec::new(),
        }
    }

    /// Flat gain, no leakage.
    pub fn ideal(lo_frequency_hz: f64) -> Self {
        MixerModel {
            gain_bandwidth_hz: None,
            ..Self::new(lo_frequency_hz)
        }
    }

    /// Conversion gain at RF output frequency `f`.
    pub fn conversion_gain(&self, f: f64) -> Complex64 {
        if let Some(t) = &self.gain_table {
            return t.evaluate(f);
        }
        match self.gain_bandwidth_hz {
            Some(b) => Complex64::new((1.0 + (f / b).powi(4)).sqrt().recip(), 0.0),
            None => Complex64::new(1.0, 0.0),
        }
    }
}

fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Multiplies the IF waveform by `2 cos(2π f_LO t)` and weights the result
/// by the conversion gain, so a unit IF tone yields two unit RF tones at
/// `f_LO ± f_IF`. Leakage tones and spurs are added afterwards.
pub fn mixer_upconvert(if_wave: &SampledWaveform, model: &MixerModel) -> Result<SampledWaveform> {
    if !if_wave.domain().is_real() {
        return Err(Error::param("mixer IF input must be real-valued"));
    }
    let fs = if_wave.sample_rate_hz();
    let f_lo = model.lo_frequency_hz;
    if !(f_lo > 0.0 && f_lo < fs / 2.0) {
        return Err(Error::param(format!(
            "LO {f_lo:.4e} Hz must lie in (0, {:.4e}) Hz",
            fs / 2.0
        )));
    }
    let above = spectrum::energy_fraction_above(if_wave, f_lo);
    if above > IF_ALIAS_ERROR_FRACTION {
        return Err(Error::param(format!(
            "{:.1} dB of the IF energy lies above the LO and would fold onto the lower image",
            10.0 * above.log10()
        )));
    }
    if above > IF_ALIAS_WARN_FRACTION {
        log::warn!(
            "{:.1} dB of the IF energy lies above the LO",
            10.0 * above.log10()
        );
    }
    let w = 2.0 * PI * f_lo / fs;
    let product: Vec<Complex64> = if_wave
        .samples()
        .iter()
        .enumerate()
        .map(|(n, v)| Complex64::new(2.0 * v.re * (w * n as f64).cos(), 0.0))
        .collect();
    let mixed = if_wave.with_samples(product);
    let mut out = if model.gain_table.is_some() || model.gain_bandwidth_hz.is_some() {
        spectrum::apply_response(&mixed, |f| model.conversion_gain(f))
    } else {
        mixed
    };
    let mut tones: Vec<(f64, f64)> = model
        .spurs
        .iter()
        .map(|s| (s.frequency_hz, s.level_db))
        .collect();
    if let Some(db) = model.lo_leakage_db {
        tones.push((f_lo, db));
    }
    let mut samples = out.samples().to_vec();
    for (f, db) in tones {
        let a = db_to_amplitude(db);
        let step = 2.0 * PI * f / fs;
        for (n, s) in samples.iter_mut().enumerate() {
            s.re += a * (step * n as f64).cos();
        }
    }
    if let Some(db) = model.if_leakage_db {
        let a = db_to_amplitude(db);
        for (s, x) in samples.iter_mut().zip(if_wave.samples()) {
            s.re += a * x.re;
        }
    }
    out = out.with_samples(samples);
    Ok(out)
}

/// Analog highpass selecting the upper image after the mixer.
pub fn image_reject(
    wave: &SampledWaveform,
    cutoff_hz: f64,
    shape: FilterShape,
) -> Result<SampledWaveform> {
    crate::sigcore::apply_filter(wave, &FilterSpec::highpass(cutoff_hz, shape))
}
