use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigcore::spectrum;
use crate::sigcore::{
    apply_filter, resample, FilterShape, FilterSpec, SampledWaveform, DEFAULT_TRANSITION_HZ,
};

fn default_transition() -> f64 {
    DEFAULT_TRANSITION_HZ
}

/// Frequency plan of the two-branch bandwidth-extension transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    pub digital_lpf_cutoff_hz: f64,
    pub digital_hpf_cutoff_hz: f64,
    pub analog_hpf_cutoff_hz: f64,
    pub lo_frequency_hz: f64,
    pub awg_rate_hz: f64,
    pub awg_bandwidth_hz: f64,
    /// Transition width of the complementary digital crossover filters.
    #[serde(default = "default_transition")]
    pub crossover_transition_hz: f64,
}

impl BandPlan {
    /// C-band plan: digital crossover at 76 GHz, analog HPF at 75 GHz, LO at
    /// 72 GHz.
    pub fn c_band() -> Self {
        BandPlan {
            digital_lpf_cutoff_hz: 76e9,
            digital_hpf_cutoff_hz: 76e9,
            analog_hpf_cutoff_hz: 75e9,
            lo_frequency_hz: 72e9,
            awg_rate_hz: 256e9,
            awg_bandwidth_hz: 80e9,
            crossover_transition_hz: DEFAULT_TRANSITION_HZ,
        }
    }

    /// O-band plan: digital crossover at 82 GHz, analog HPF at 82 GHz, LO at
    /// 76 GHz.
    pub fn o_band() -> Self {
        BandPlan {
            digital_lpf_cutoff_hz: 82e9,
            digital_hpf_cutoff_hz: 82e9,
            analog_hpf_cutoff_hz: 82e9,
            lo_frequency_hz: 76e9,
            ..Self::c_band()
        }
    }

    /// Crossover frequency between the two branches.
    pub fn crossover_hz(&self) -> f64 {
        0.5 * (self.digital_lpf_cutoff_hz + self.digital_hpf_cutoff_hz)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("digital LPF cutoff", self.digital_lpf_cutoff_hz),
            ("digital HPF cutoff", self.digital_hpf_cutoff_hz),
            ("analog HPF cutoff", self.analog_hpf_cutoff_hz),
            ("LO frequency", self.lo_frequency_hz),
            ("AWG rate", self.awg_rate_hz),
            ("AWG bandwidth", self.awg_bandwidth_hz),
            ("crossover transition", self.crossover_transition_hz),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!(
                    "band plan {name} must be positive, got {v}"
                )));
            }
        }
        if self.lo_frequency_hz >= self.digital_hpf_cutoff_hz {
            return Err(Error::param(format!(
                "LO {:.3e} Hz must lie below the digital HPF cutoff {:.3e} Hz",
                self.lo_frequency_hz, self.digital_hpf_cutoff_hz
            )));
        }
        if self.digital_hpf_cutoff_hz - self.lo_frequency_hz >= self.awg_bandwidth_hz {
            return Err(Error::param(
                "down-converted upper band starts above the AWG bandwidth",
            ));
        }
        if self.awg_bandwidth_hz >= self.awg_rate_hz / 2.0 {
            return Err(Error::param(
                "AWG bandwidth must be below the AWG Nyquist frequency",
            ));
        }
        if self.digital_lpf_cutoff_hz >= self.awg_rate_hz / 2.0 {
            return Err(Error::param(
                "digital LPF cutoff must be below the AWG Nyquist frequency",
            ));
        }
        Ok(())
    }
}

/// Splits a real wideband waveform into the lower-band AWG signal and the
/// down-converted upper-band IF signal, both at the AWG rate.
///
/// The two digital filters are complementary windowed-sinc FIRs, so with
/// equal cutoffs `LPF + HPF = 1` at every frequency. The upper band is
/// shifted down by the LO frequency using its analytic signal, keeping only
/// the positive-frequency image, then limited to the AWG bandwidth.
pub fn band_split(
    wave: &SampledWaveform,
    plan: &BandPlan,
) -> Result<(SampledWaveform, SampledWaveform)> {
    plan.validate()?;
    if !wave.domain().is_real() {
        return Err(Error::param("band split expects a real-valued waveform"));
    }
    let fs = wave.sample_rate_hz();
    let highest = plan
        .digital_hpf_cutoff_hz
        .max(plan.digital_lpf_cutoff_hz)
        .max(plan.awg_bandwidth_hz);
    if fs < 2.0 * highest {
        return Err(Error::param(format!(
            "sample rate {fs:.3e} Hz is below twice the highest plan frequency {highest:.3e} Hz"
        )));
    }
    let shape = FilterShape::Windowed {
        transition_hz: plan.crossover_transition_hz,
    };
    let lower = apply_filter(
        wave,
        &FilterSpec::lowpass(plan.digital_lpf_cutoff_hz, shape),
    )?;
    let upper = apply_filter(
        wave,
        &FilterSpec::highpass(plan.digital_hpf_cutoff_hz, shape),
    )?;

    let z = spectrum::analytic(upper.samples());
    let step = -2.0 * PI * plan.lo_frequency_hz / fs;
    let shifted: Vec<Complex64> = z
        .iter()
        .enumerate()
        .map(|(n, v)| Complex64::new((v * Complex64::from_polar(1.0, step * n as f64)).re, 0.0))
        .collect();
    let if_wave = upper.retag(shifted, upper.domain());
    let if_wave = apply_filter(
        &if_wave,
        &FilterSpec::lowpass(plan.awg_bandwidth_hz, FilterShape::default()),
    )?;

    Ok((
        resample(&lower, plan.awg_rate_hz)?,
        resample(&if_wave, plan.awg_rate_hz)?,
    ))
}
