use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{analog_lowpass, default_analog_shape};
use crate::error::{Error, Result};
use crate::sigcore::spectrum;
use crate::sigcore::{apply_filter, FilterShape, SampledWaveform};

/// Electrical amplifier: bandwidth limit, linear gain and optional
/// compression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplifierModel {
    pub gain_db: f64,
    /// 3-dB bandwidth; `None` is unlimited.
    pub bandwidth_hz: Option<f64>,
    #[serde(default = "default_analog_shape")]
    pub bandwidth_shape: FilterShape,
    /// Input amplitude at 1-dB compression; `None` is linear.
    pub input_p1db: Option<f64>,
}

impl AmplifierModel {
    pub fn new(gain_db: f64, bandwidth_hz: f64) -> Self {
        AmplifierModel {
            gain_db,
            bandwidth_hz: Some(bandwidth_hz),
            bandwidth_shape: default_analog_shape(),
            input_p1db: None,
        }
    }

    pub fn linear_gain(&self) -> f64 {
        10f64.powf(self.gain_db / 20.0)
    }

    /// Small-signal response including the gain.
    pub fn response(&self, f: f64, sample_rate_hz: f64) -> Complex64 {
        let bw = self
            .bandwidth_hz
            .map(|b| analog_lowpass(b, self.bandwidth_shape).response_at(f, sample_rate_hz))
            .unwrap_or(Complex64::new(1.0, 0.0));
        bw * self.linear_gain()
    }
}

/// Normalized argument `z` at which `tanh(z) / z` equals −1 dB.
fn tanh_p1db_argument() -> f64 {
    let target = 10f64.powf(-1.0 / 20.0);
    let (mut lo, mut hi) = (1e-6f64, 3.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid.tanh() / mid > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bandwidth filter, then gain (with compression if configured).
pub fn amplify(wave: &SampledWaveform, model: &AmplifierModel) -> Result<SampledWaveform> {
    if !model.gain_db.is_finite() {
        return Err(Error::param("amplifier gain must be finite"));
    }
    if !wave.domain().is_real() {
        return Err(Error::param("amplifier input must be real-valued"));
    }
    let filtered = match model.bandwidth_hz {
        Some(b) => apply_filter(wave, &analog_lowpass(b, model.bandwidth_shape))?,
        None => wave.clone(),
    };
    let g = model.linear_gain();
    // Compression is y = G·V·tanh(x/V), scaled so an input of `input_p1db`
    // comes out 1 dB below the linear extrapolation.
    match model.input_p1db {
        None => Ok(filtered.scaled(g)),
        Some(p) if p > 0.0 => {
            let v = p / tanh_p1db_argument();
            Ok(filtered.with_samples(
                filtered
                    .samples()
                    .iter()
                    .map(|s| Complex64::new(g * v * (s.re / v).tanh(), 0.0))
                    .collect(),
            ))
        }
        Some(p) => Err(Error::param(format!(
            "1-dB compression input must be positive, got {p}"
        ))),
    }
}

/// Active combiner: `lower + g · delay(upper_rf, skew)`.
pub fn combine(
    lower: &SampledWaveform,
    upper_rf: &SampledWaveform,
    gain_imbalance_db: f64,
    skew_s: f64,
) -> Result<SampledWaveform> {
    let upper = if skew_s != 0.0 {
        spectrum::delay(upper_rf, skew_s)
    } else {
        upper_rf.clone()
    };
    let upper = if gain_imbalance_db != 0.0 {
        upper.scaled(10f64.powf(gain_imbalance_db / 20.0))
    } else {
        upper
    };
    lower.try_add(&upper)
}
