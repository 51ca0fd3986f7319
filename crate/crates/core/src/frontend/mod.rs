//! Behavioral models of the analog transmitter: AWG channels, the
//! up-converting mixer, analog filters, amplifiers, the active combiner, the
//! laser and the Mach-Zehnder modulator.
//!
//! The optical carrier is represented by its complex envelope; electrical
//! signals are real. All models operate on the internal analog sample rate.

mod amp;
mod dac;
mod mixer;
mod mzm;

pub use amp::{amplify, combine, AmplifierModel};
pub use dac::{dac, quantize, DacModel};
pub use mixer::{image_reject, mixer_upconvert, MixerModel, Spur};
pub use mzm::{apply_rin, mzm_modulate, LaserModel, MzmModel};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::Seed;
use crate::sigcore::{FilterShape, FilterSpec, SampledWaveform};
use crate::txdsp::BandPlan;

fn default_analog_shape() -> FilterShape {
    FilterShape::Butterworth { order: 2 }
}

fn default_image_shape() -> FilterShape {
    FilterShape::Ideal
}

fn analog_lowpass(cutoff_hz: f64, shape: FilterShape) -> FilterSpec {
    FilterSpec::lowpass(cutoff_hz, shape)
}

/// The complete two-branch electrical transmitter followed by the
/// modulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TxFrontend {
    /// Internal analog simulation rate.
    pub analog_rate_hz: f64,
    /// Both AWG channels share this model.
    pub dac: DacModel,
    pub mixer: MixerModel,
    pub image_hpf_cutoff_hz: f64,
    #[serde(default = "default_image_shape")]
    pub image_hpf_shape: FilterShape,
    /// Amplifier between the image-reject HPF and the combiner.
    #[serde(default)]
    pub upper_amplifier: Option<AmplifierModel>,
    #[serde(default)]
    pub combiner_gain_imbalance_db: f64,
    #[serde(default)]
    pub combiner_skew_s: f64,
    /// Amplifiers between the combiner and the modulator, in order.
    pub amplifiers: Vec<AmplifierModel>,
    pub mzm: MzmModel,
    pub laser: LaserModel,
}

impl TxFrontend {
    /// Front end with every device ideal: unlimited bandwidths, no hold
    /// droop, flat mixer, brick-wall image filter, no amplifiers.
    pub fn ideal(plan: &BandPlan, laser: LaserModel, v_pi_volts: f64) -> Self {
        TxFrontend {
            analog_rate_hz: 512e9,
            dac: DacModel::ideal(plan.awg_rate_hz),
            mixer: MixerModel::ideal(plan.lo_frequency_hz),
            image_hpf_cutoff_hz: plan.analog_hpf_cutoff_hz,
            image_hpf_shape: FilterShape::Ideal,
            upper_amplifier: None,
            combiner_gain_imbalance_db: 0.0,
            combiner_skew_s: 0.0,
            amplifiers: Vec::new(),
            mzm: MzmModel {
                bandwidth_hz: None,
                ..MzmModel::new(v_pi_volts)
            },
            laser,
        }
    }

    /// Lower and upper AWG waveforms to the modulator drive voltage.
    pub fn electrical(
        &self,
        lower: &SampledWaveform,
        upper_if: &SampledWaveform,
    ) -> Result<SampledWaveform> {
        let l = dac(lower, &self.dac, self.analog_rate_hz)?;
        let u = dac(upper_if, &self.dac, self.analog_rate_hz)?;
        let u = mixer_upconvert(&u, &self.mixer)?;
        let mut u = image_reject(&u, self.image_hpf_cutoff_hz, self.image_hpf_shape)?;
        if let Some(a) = &self.upper_amplifier {
            u = amplify(&u, a)?;
        }
        let mut drive = combine(
            &l,
            &u,
            self.combiner_gain_imbalance_db,
            self.combiner_skew_s,
        )?;
        for a in &self.amplifiers {
            drive = amplify(&drive, a)?;
        }
        Ok(drive)
    }

    /// Drive voltage to optical field, including laser RIN.
    pub fn optical(&self, drive: &SampledWaveform, seed: Seed) -> Result<SampledWaveform> {
        let field = mzm_modulate(drive, &self.laser, &self.mzm)?;
        apply_rin(&field, &self.laser, seed)
    }

    /// Small-signal gain from AWG samples to modulator drive at DC.
    pub fn dc_gain(&self) -> f64 {
        self.amplifiers.iter().map(|a| a.linear_gain()).product()
    }

    /// Small-signal response from the wideband digital signal (before the
    /// band split) to the modulator's electro-optic output, excluding the
    /// modulator's static transfer.
    pub fn linear_response(&self, plan: &BandPlan, f: f64) -> Complex64 {
        let fs = self.analog_rate_hz;
        let shape = FilterShape::Windowed {
            transition_hz: plan.crossover_transition_hz,
        };
        let f = f.abs();
        let lpf = FilterSpec::lowpass(plan.digital_lpf_cutoff_hz, shape).response_at(f, fs);
        let hpf = FilterSpec::highpass(plan.digital_hpf_cutoff_hz, shape).response_at(f, fs);
        let lower = self.dac.response(f, fs);
        let f_if = f - self.mixer.lo_frequency_hz;
        let mut upper = if f_if > 0.0 {
            self.dac.response(f_if, fs)
                * self.mixer.conversion_gain(f)
                * FilterSpec::highpass(self.image_hpf_cutoff_hz, self.image_hpf_shape)
                    .response_at(f, fs)
                * 10f64.powf(self.combiner_gain_imbalance_db / 20.0)
                * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * self.combiner_skew_s)
        } else {
            Complex64::new(0.0, 0.0)
        };
        if let Some(a) = &self.upper_amplifier {
            upper *= a.response(f, fs);
        }
        let common: Complex64 = self
            .amplifiers
            .iter()
            .map(|a| a.response(f, fs))
            .product::<Complex64>()
            * self.mzm.response(f, fs);
        (lpf * lower + hpf * upper) * common
    }
}
