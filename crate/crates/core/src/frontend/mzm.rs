use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Seed};
use crate::sigcore::{apply_filter, Domain, FilterShape, FilterSpec, SampledWaveform};

/// Continuous-wave laser feeding the modulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaserModel {
    pub wavelength_nm: f64,
    /// Optical power at the modulator input.
    pub output_power_dbm: f64,
    /// Relative intensity noise in dB/Hz; `None` is noiseless.
    pub rin_db_hz: Option<f64>,
}

impl LaserModel {
    pub fn new(wavelength_nm: f64, output_power_dbm: f64) -> Self {
        LaserModel {
            wavelength_nm,
            output_power_dbm,
            rin_db_hz: None,
        }
    }

    pub fn power_w(&self) -> f64 {
        1e-3 * 10f64.powf(self.output_power_dbm / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.output_power_dbm.is_finite() {
            return Err(Error::param("laser power must be finite"));
        }
        let in_o = (1260.0..=1360.0).contains(&self.wavelength_nm);
        let in_c = (1500.0..=1625.0).contains(&self.wavelength_nm);
        if !(in_o || in_c) {
            return Err(Error::param(format!(
                "laser wavelength {} nm outside the O (1260-1360 nm) and C/L (1500-1625 nm) ranges",
                self.wavelength_nm
            )));
        }
        Ok(())
    }
}

/// Single-drive push-pull Mach-Zehnder modulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MzmModel {
    pub v_pi_volts: f64,
    /// Frequency at which the electro-optic response is 4.5 dB down
    /// (2nd-order Butterworth); `None` is unlimited.
    pub bandwidth_hz: Option<f64>,
    pub bias_voltage: f64,
    pub insertion_loss_db: f64,
}

/// Attenuation at `bandwidth_hz` in the modulator response model.
const MZM_EDGE_DB: f64 = 4.5;

impl MzmModel {
    /// Quadrature-biased modulator with the given switching voltage.
    pub fn new(v_pi_volts: f64) -> Self {
        MzmModel {
            v_pi_volts,
            bandwidth_hz: Some(110e9),
            bias_voltage: -v_pi_volts / 2.0,
            insertion_loss_db: 0.0,
        }
    }

    /// Butterworth filter realizing the 4.5-dB bandwidth.
    pub fn bandwidth_filter(&self) -> Option<FilterSpec> {
        self.bandwidth_hz.map(|b| {
            // |H|^2 = 1 / (1 + (f/fc)^4) reaches -4.5 dB at f = b.
            let fc = b / (10f64.powf(MZM_EDGE_DB / 10.0) - 1.0).powf(0.25);
            FilterSpec::lowpass(fc, FilterShape::Butterworth { order: 2 })
        })
    }

    pub fn response(&self, f: f64, sample_rate_hz: f64) -> Complex64 {
        self.bandwidth_filter()
            .map(|s| s.response_at(f, sample_rate_hz))
            .unwrap_or(Complex64::new(1.0, 0.0))
    }
}

/// Modulates the laser with the drive voltage:
/// `E = sqrt(P) · cos(π (v + v_bias) / (2 V_π))` after the modulator
/// bandwidth filter on `v`. The output is the real-valued optical complex
/// envelope (chirp-free push-pull operation).
pub fn mzm_modulate(
    drive: &SampledWaveform,
    laser: &LaserModel,
    model: &MzmModel,
) -> Result<SampledWaveform> {
    if !(model.v_pi_volts > 0.0) {
        return Err(Error::param("modulator V_pi must be positive"));
    }
    if !drive.domain().is_real() {
        return Err(Error::param("modulator drive must be real-valued"));
    }
    laser.validate()?;
    let v = match model.bandwidth_filter() {
        Some(spec) => apply_filter(drive, &spec)?,
        None => drive.clone(),
    };
    let amp = (laser.power_w() * 10f64.powf(-model.insertion_loss_db / 10.0)).sqrt();
    let k = PI / (2.0 * model.v_pi_volts);
    let field = v
        .samples()
        .iter()
        .map(|s| Complex64::new(amp * (k * (s.re + model.bias_voltage)).cos(), 0.0))
        .collect();
    SampledWaveform::new(drive.sample_rate_hz(), field, Domain::OpticalField)
}

/// Applies the laser's relative intensity noise to an optical field:
/// `P(t) → P(t)·(1 + δ(t))` with white Gaussian `δ` of one-sided density
/// `RIN` over the simulation bandwidth.
pub fn apply_rin(
    field: &SampledWaveform,
    laser: &LaserModel,
    seed: Seed,
) -> Result<SampledWaveform> {
    let Some(rin) = laser.rin_db_hz else {
        return Ok(field.clone());
    };
    if field.domain() != Domain::OpticalField {
        return Err(Error::param("RIN applies to optical fields"));
    }
    let sigma = (10f64.powf(rin / 10.0) * field.sample_rate_hz() / 2.0).sqrt();
    let mut rng = seed.derive(stream::RIN).rng();
    let samples = field
        .samples()
        .iter()
        .map(|e| {
            let d: f64 = StandardNormal.sample(&mut rng);
            e * (1.0 + sigma * d).max(0.0).sqrt()
        })
        .collect();
    Ok(field.with_samples(samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dc(v: f64) -> SampledWaveform {
        SampledWaveform::from_real(512e9, &[v; 16], Domain::Electrical).unwrap()
    }

    fn unbounded(v_pi: f64) -> MzmModel {
        MzmModel {
            bandwidth_hz: None,
            ..MzmModel::new(v_pi)
        }
    }

    #[test]
    fn quadrature_and_null() {
        let laser = LaserModel::new(1550.0, 20.0);
        let p = laser.power_w();
        let m = unbounded(2.8);
        let q = mzm_modulate(&dc(0.0), &laser, &m).unwrap();
        assert!((q.samples()[0].norm_sqr() - p / 2.0).abs() < 1e-15);
        // Null half a V_pi below the default bias...
        let null = mzm_modulate(&dc(-1.4), &laser, &m).unwrap();
        assert!(null.samples()[0].norm_sqr() < 1e-12 * p);
        // ...and half a V_pi above with the opposite quadrature bias.
        let m_pos = MzmModel {
            bias_voltage: 1.4,
            ..m.clone()
        };
        let null = mzm_modulate(&dc(1.4), &laser, &m_pos).unwrap();
        assert!(null.samples()[0].norm_sqr() < 1e-12 * p);
    }

    #[test]
    fn small_signal_modulation_depth() {
        let laser = LaserModel::new(1310.0, 20.0);
        let m = unbounded(2.5);
        let a = 0.05 * 2.5;
        let hi = mzm_modulate(&dc(a), &laser, &m).unwrap().samples()[0].norm_sqr();
        let lo = mzm_modulate(&dc(-a), &laser, &m).unwrap().samples()[0].norm_sqr();
        let depth = (hi - lo) / (hi + lo);
        // Intensity P/2 (1 + sin(π v / V_pi)) gives depth sin(π a / V_pi).
        let first_order = PI * a / 2.5;
        assert!((depth / first_order - 1.0).abs() < 0.01);
        assert!((depth - (PI * a / 2.5).sin()).abs() < 1e-12);
    }

    #[test]
    fn bandwidth_is_4p5_db_down_at_110_ghz() {
        let m = MzmModel::new(2.8);
        let db = 20.0 * m.response(110e9, 512e9).norm().log10();
        assert!((db + 4.5).abs() < 1e-9);
    }

    #[test]
    fn intensity_stays_in_range() {
        let laser = LaserModel::new(1550.0, 10.0);
        let v: Vec<f64> = (0..200).map(|i| (i as f64 - 100.0) * 0.1).collect();
        let drive = SampledWaveform::from_real(512e9, &v, Domain::Electrical).unwrap();
        let out = mzm_modulate(&drive, &laser, &unbounded(2.8)).unwrap();
        for e in out.samples() {
            assert!(e.norm_sqr() <= laser.power_w() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rin_is_seeded() {
        let laser = LaserModel {
            rin_db_hz: Some(-150.0),
            ..LaserModel::new(1550.0, 20.0)
        };
        let cw = mzm_modulate(&dc(0.0), &laser, &unbounded(2.8)).unwrap();
        let a = apply_rin(&cw, &laser, Seed::from(1)).unwrap();
        assert_eq!(a, apply_rin(&cw, &laser, Seed::from(1)).unwrap());
        assert_ne!(a, cw);
        assert!(LaserModel::new(900.0, 0.0).validate().is_err());
    }
}
