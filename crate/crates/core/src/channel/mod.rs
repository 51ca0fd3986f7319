//! Fiber propagation and optical conditioning before the photodiode:
//! chromatic dispersion, loss, optical amplification with ASE, and the
//! programmable optical bandpass filter.

mod multicore;
pub use multicore::multicore_batch;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Seed};
use crate::sigcore::spectrum;
use crate::sigcore::{Domain, FilterShape, FilterSpec, ResponseTable, SampledWaveform};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Single-mode fiber span (one core of a multi-core fiber counts as one
/// span).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    pub label: String,
    pub length_km: f64,
    pub zero_dispersion_wavelength_nm: f64,
    pub dispersion_slope_ps_nm2_km: f64,
    pub attenuation_db_km: f64,
}

impl FiberSpec {
    /// 11-km dispersion-shifted fiber with `D(1550 nm) = +0.5 ps/nm/km`.
    pub fn dsf_11km() -> Self {
        let s0 = 0.07;
        let lambda: f64 = 1550.0;
        let d = 0.5;
        // Solve (S0/4)(λ − λ0⁴/λ³) = D for λ0.
        let lambda0 = (lambda.powi(3) * (lambda - 4.0 * d / s0)).powf(0.25);
        FiberSpec {
            label: "DSF-11km".into(),
            length_km: 11.0,
            zero_dispersion_wavelength_nm: lambda0,
            dispersion_slope_ps_nm2_km: s0,
            attenuation_db_km: 0.21,
        }
    }

    /// One 2-km core of the uncoupled four-core fiber (`core` is 0-based).
    pub fn four_core(core: usize) -> Self {
        FiberSpec {
            label: format!("4CF-core-{}", core + 1),
            length_km: 2.0,
            zero_dispersion_wavelength_nm: 1280.0,
            dispersion_slope_ps_nm2_km: 0.092,
            attenuation_db_km: 0.35,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_km >= 0.0 && self.length_km.is_finite()) {
            return Err(Error::param(format!(
                "fiber length {} km must be >= 0",
                self.length_km
            )));
        }
        if !(self.dispersion_slope_ps_nm2_km >= 0.0) {
            return Err(Error::param("dispersion slope must be >= 0"));
        }
        if !(self.zero_dispersion_wavelength_nm > 0.0) {
            return Err(Error::param("zero-dispersion wavelength must be positive"));
        }
        if !(self.attenuation_db_km >= 0.0) {
            return Err(Error::param("attenuation must be >= 0"));
        }
        Ok(())
    }

    pub fn loss_db(&self) -> f64 {
        self.attenuation_db_km * self.length_km
    }

    /// Accumulated dispersion `D·L` in ps/nm at `lambda_nm`.
    pub fn accumulated_dispersion_ps_nm(&self, lambda_nm: f64) -> Result<f64> {
        Ok(dispersion_coefficient(lambda_nm, self)? * self.length_km)
    }
}

/// Dispersion parameter `D(λ) = (S0/4)(λ − λ0⁴/λ³)` in ps/(nm·km).
pub fn dispersion_coefficient(lambda_nm: f64, spec: &FiberSpec) -> Result<f64> {
    if !(lambda_nm > 0.0) {
        return Err(Error::param(format!(
            "wavelength must be positive, got {lambda_nm}"
        )));
    }
    let l0 = spec.zero_dispersion_wavelength_nm;
    if lambda_nm == l0 {
        return Ok(0.0);
    }
    Ok(spec.dispersion_slope_ps_nm2_km / 4.0 * (lambda_nm - l0.powi(4) / lambda_nm.powi(3)))
}

/// Quadratic-phase response `exp(+jπ λ² (D·L) f² / c)` of an accumulated
/// dispersion given in ps/nm. Positive `D·L` (anomalous) advances the higher
/// frequencies.
pub fn dispersion_response(accumulated_ps_nm: f64, lambda_nm: f64, f: f64) -> Complex64 {
    // ps/nm -> s/m.
    let dl = accumulated_ps_nm * 1e-12 / 1e-9;
    let lambda = lambda_nm * 1e-9;
    Complex64::from_polar(1.0, PI * lambda * lambda * dl * f * f / SPEED_OF_LIGHT)
}

fn check_optical(field: &SampledWaveform) -> Result<()> {
    if field.domain() != Domain::OpticalField {
        return Err(Error::param(format!(
            "expected an optical field, got a {:?} waveform",
            field.domain()
        )));
    }
    Ok(())
}

/// Linear fiber propagation: dispersion all-pass followed by the span loss.
pub fn propagate(
    field: &SampledWaveform,
    spec: &FiberSpec,
    lambda_nm: f64,
) -> Result<SampledWaveform> {
    check_optical(field)?;
    spec.validate()?;
    let dl = spec.accumulated_dispersion_ps_nm(lambda_nm)?;
    let out = if dl == 0.0 {
        field.clone()
    } else {
        spectrum::apply_response(field, |f| dispersion_response(dl, lambda_nm, f))
    };
    Ok(out.scaled(10f64.powf(-spec.loss_db() / 20.0)))
}

/// Optical amplifier with additive white ASE on the complex envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalAmpSpec {
    pub label: String,
    pub gain_db: f64,
    /// ASE power per hertz of simulation bandwidth (W/Hz), summed over both
    /// quadratures.
    pub noise_density_w_hz: f64,
}

impl OpticalAmpSpec {
    pub fn noiseless(label: &str, gain_db: f64) -> Self {
        OpticalAmpSpec {
            label: label.into(),
            gain_db,
            noise_density_w_hz: 0.0,
        }
    }
}

/// Scales the field by the amplifier gain and adds circular complex
/// Gaussian noise of variance `density × sample rate`.
pub fn optical_amplify(
    field: &SampledWaveform,
    spec: &OpticalAmpSpec,
    seed: Seed,
) -> Result<SampledWaveform> {
    check_optical(field)?;
    if !(spec.noise_density_w_hz >= 0.0) {
        return Err(Error::param("ASE density must be >= 0"));
    }
    if !spec.gain_db.is_finite() {
        return Err(Error::param("amplifier gain must be finite"));
    }
    let g = 10f64.powf(spec.gain_db / 20.0);
    let amplified = field.scaled(g);
    if spec.noise_density_w_hz == 0.0 {
        return Ok(amplified);
    }
    let sigma = (spec.noise_density_w_hz * field.sample_rate_hz() / 2.0).sqrt();
    let mut rng = seed.derive(stream::ASE).rng();
    let samples = amplified
        .samples()
        .iter()
        .map(|e| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            e + Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    Ok(amplified.with_samples(samples))
}

/// Applies a programmable optical filter. One-sided tables are extended as
/// even functions of frequency (`H(−f) = H(f)`), which suits bandpass
/// magnitudes and quadratic phases on the complex envelope.
pub fn obpf(field: &SampledWaveform, response: &ResponseTable) -> Result<SampledWaveform> {
    check_optical(field)?;
    if response.is_one_sided() {
        Ok(spectrum::apply_response(field, |f| {
            response.evaluate(f.abs())
        }))
    } else {
        Ok(spectrum::apply_response(field, |f| response.evaluate(f)))
    }
}

/// Parametric OBPF: passband, residual-dispersion trim and photodiode
/// roll-off compensation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObpfSpec {
    /// Full passband width around the carrier; `None` passes everything.
    pub bandwidth_hz: Option<f64>,
    /// Accumulated dispersion to undo, in ps/nm.
    #[serde(default)]
    pub cd_trim_ps_nm: f64,
    /// Photodiode 3-dB bandwidth whose magnitude roll-off is inverted.
    #[serde(default)]
    pub pd_inverse_bandwidth_hz: Option<f64>,
    /// Cap on the inverse shaping gain.
    #[serde(default = "default_pd_boost")]
    pub max_boost_db: f64,
}

fn default_pd_boost() -> f64 {
    10.0
}

impl ObpfSpec {
    pub fn passband(bandwidth_hz: f64) -> Self {
        ObpfSpec {
            bandwidth_hz: Some(bandwidth_hz),
            cd_trim_ps_nm: 0.0,
            pd_inverse_bandwidth_hz: None,
            max_boost_db: default_pd_boost(),
        }
    }

    /// Two-sided response table covering `[-fs/2, fs/2]`.
    pub fn response_table(
        &self,
        lambda_nm: f64,
        pd_shape: FilterShape,
        sample_rate_hz: f64,
    ) -> Result<ResponseTable> {
        let half = sample_rate_hz / 2.0;
        let points = 4097;
        let freqs: Vec<f64> = (0..points)
            .map(|i| -half + 2.0 * half * i as f64 / (points - 1) as f64)
            .collect();
        let pd = self
            .pd_inverse_bandwidth_hz
            .map(|b| FilterSpec::lowpass(b, pd_shape));
        let max_gain = 10f64.powf(self.max_boost_db / 20.0);
        ResponseTable::sample(freqs, |f| {
            let pass = match self.bandwidth_hz {
                Some(b) if f.abs() > b / 2.0 => 0.0,
                _ => 1.0,
            };
            let shaping = pd
                .as_ref()
                .map(|s| (1.0 / s.response_at(f, sample_rate_hz).norm()).min(max_gain))
                .unwrap_or(1.0);
            dispersion_response(-self.cd_trim_ps_nm, lambda_nm, f) * (pass * shaping)
        })
    }
}
