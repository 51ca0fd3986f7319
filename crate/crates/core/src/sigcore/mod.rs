//! Waveforms, filters, resampling and signal-quality metrics shared by every
//! stage of the link.
//!
//! All processing is whole-record: a waveform is one period of a periodic
//! signal and filtering is circular, performed by multiplying the DFT of the
//! record.

mod filter;
mod resample;
mod rrc;
pub mod spectrum;
mod waveform;

pub use filter::{
    apply_filter, windowed_lowpass_taps, FilterShape, FilterSpec, ResponseTable,
    DEFAULT_TRANSITION_HZ,
};
pub use resample::{resample, resampled_len};
pub use rrc::{design_rrc, rrc_impulse, rrc_spectrum};
pub use waveform::{Domain, SampledWaveform};

use crate::error::{Error, Result};

/// Floor returned by [`nmse_db`] for an exact match.
pub const NMSE_FLOOR_DB: f64 = -200.0;

/// Normalized mean-squared error `10 log10(sum|ref - test|^2 / sum|ref|^2)`,
/// floored at -200 dB.
pub fn nmse_db(reference: &SampledWaveform, test: &SampledWaveform) -> Result<f64> {
    reference.check_compatible(test)?;
    nmse_db_slices(reference.samples(), test.samples())
}

/// [`nmse_db`] on raw sample slices.
pub fn nmse_db_slices<T: Copy + Into<num_complex::Complex64>>(
    reference: &[T],
    test: &[T],
) -> Result<f64> {
    if reference.len() != test.len() {
        return Err(Error::param(format!(
            "length mismatch: {} vs {}",
            reference.len(),
            test.len()
        )));
    }
    let mut err = 0.0;
    let mut energy = 0.0;
    for (&r, &t) in reference.iter().zip(test) {
        let (r, t): (num_complex::Complex64, num_complex::Complex64) = (r.into(), t.into());
        err += (r - t).norm_sqr();
        energy += r.norm_sqr();
    }
    if energy == 0.0 {
        return Err(Error::param("NMSE reference has zero energy"));
    }
    Ok((10.0 * (err / energy).log10()).max(NMSE_FLOOR_DB))
}

/// NMSE computed in the frequency domain over the bins whose signed
/// frequency satisfies `include`.
pub fn spectral_nmse_db<F: Fn(f64) -> bool>(
    reference: &SampledWaveform,
    test: &SampledWaveform,
    include: F,
) -> Result<f64> {
    reference.check_compatible(test)?;
    let n = reference.len();
    let fs = reference.sample_rate_hz();
    let r = spectrum::fft(reference.samples());
    let t = spectrum::fft(test.samples());
    let mut err = 0.0;
    let mut energy = 0.0;
    for k in 0..n {
        if include(spectrum::bin_frequency(k, n, fs)) {
            err += (r[k] - t[k]).norm_sqr();
            energy += r[k].norm_sqr();
        }
    }
    if energy == 0.0 {
        return Err(Error::param(
            "NMSE reference has zero energy in the selected band",
        ));
    }
    Ok((10.0 * (err / energy).log10()).max(NMSE_FLOOR_DB))
}
