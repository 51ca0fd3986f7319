use num_complex::Complex64;

use super::spectrum::{fft, ifft};
use super::SampledWaveform;
use crate::error::{Error, Result};

/// Number of output samples when moving `n` samples from `from_hz` to
/// `to_hz`, if that count is an integer.
pub fn resampled_len(n: usize, from_hz: f64, to_hz: f64) -> Option<usize> {
    let m = n as f64 * to_hz / from_hz;
    let rounded = m.round();
    if rounded >= 1.0 && (m - rounded).abs() <= 1e-6 * m.max(1.0) {
        Some(rounded as usize)
    } else {
        None
    }
}

/// Band-limited resampling of a periodic record to `target_rate_hz`.
///
/// The record is treated as one period of a periodic signal, so the record
/// duration must map to an integer number of samples at the target rate.
/// Content above the smaller Nyquist frequency is discarded.
pub fn resample(wave: &SampledWaveform, target_rate_hz: f64) -> Result<SampledWaveform> {
    if !(target_rate_hz.is_finite() && target_rate_hz > 0.0) {
        return Err(Error::param(format!(
            "target rate must be positive, got {target_rate_hz}"
        )));
    }
    let n = wave.len();
    let fs = wave.sample_rate_hz();
    if (target_rate_hz - fs).abs() <= 1e-12 * fs {
        return Ok(wave.clone());
    }
    let m = resampled_len(n, fs, target_rate_hz).ok_or_else(|| {
        Error::param(format!(
            "record of {n} samples at {fs:.6e} Hz does not span an integer number of samples at {target_rate_hz:.6e} Hz"
        ))
    })?;
    let x = fft(wave.samples());
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    let small = n.min(m);
    // Bins strictly below the smaller Nyquist frequency carry over directly.
    let keep = (small - 1) / 2;
    y[0] = x[0];
    for k in 1..=keep {
        y[k] = x[k];
        y[m - k] = x[n - k];
    }
    if small % 2 == 0 {
        let h = small / 2;
        if m > n {
            // Split the old Nyquist bin between +/- h.
            let v = x[h] * 0.5;
            y[h] = v;
            y[m - h] = v;
        } else {
            // Fold both sides onto the new Nyquist bin.
            y[h] = x[h] + x[n - h];
        }
    }
    let scale = m as f64 / n as f64;
    let out: Vec<Complex64> = ifft(&y).into_iter().map(|v| v * scale).collect();
    Ok(wave.with_samples(out).with_rate(target_rate_hz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigcore::{nmse_db, spectrum, Domain};
    use std::f64::consts::PI;

    #[test]
    fn dc_is_preserved() {
        let w = SampledWaveform::from_real(10.0, &[0.7; 30], Domain::Electrical).unwrap();
        for target in [20.0, 5.0, 16.0] {
            let r = resample(&w, target).unwrap();
            assert!((r.sample_rate_hz() - target).abs() < 1e-12);
            assert!(r.real_parts().iter().all(|&v| (v - 0.7).abs() < 1e-12));
        }
    }

    #[test]
    fn tone_survives_upsampling() {
        // 0.3 x Nyquist tone on an integer number of cycles.
        let n = 1000;
        let fs = 100.0;
        let f = 15.0;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * f * i as f64 / fs).cos())
            .collect();
        let w = SampledWaveform::from_real(fs, &x, Domain::Electrical).unwrap();
        let up = resample(&w, 2.0 * fs).unwrap();
        assert_eq!(up.len(), 2 * n);
        let amp_db = 20.0 * spectrum::tone(&up, f).norm().log10();
        assert!(amp_db.abs() < 0.05);
        // Frequency unchanged: no energy anywhere else.
        assert!(spectrum::energy_fraction_above(&up, f + 0.2) < 1e-20);
    }

    #[test]
    fn incommensurate_length_is_rejected() {
        let w = SampledWaveform::from_real(3.0, &[1.0; 10], Domain::Electrical).unwrap();
        assert!(resample(&w, 2.0).is_err());
        assert!(resample(&w, 0.0).is_err());
        assert!(resample(&w, -1.0).is_err());
    }

    #[test]
    fn rational_roundtrip_on_bandlimited_signal() {
        // 27 samples at 216 -> 32 at 256 and back.
        let n = 27 * 40;
        let mut x = vec![0.0; n];
        for (k, amp) in [(3usize, 1.0), (50, 0.5), (200, 0.3), (400, 0.2)] {
            for (i, v) in x.iter_mut().enumerate() {
                *v += amp * (2.0 * PI * (k * i) as f64 / n as f64 + k as f64).cos();
            }
        }
        let w = SampledWaveform::from_real(216.0, &x, Domain::Electrical).unwrap();
        let there = resample(&w, 256.0).unwrap();
        let back = resample(&there, 216.0).unwrap();
        assert!(nmse_db(&w, &back).unwrap() < -100.0);
    }
}
