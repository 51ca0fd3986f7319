//! FFT helpers for whole-record (circular) frequency-domain processing.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::SampledWaveform;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward DFT.
pub fn fft(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(&mut buf));
    buf
}

/// Inverse DFT including the 1/N normalization.
pub fn ifft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(&mut buf));
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|x| *x *= scale);
    buf
}

/// Signed frequency of DFT bin `k` for an `n`-point transform at rate `fs`.
/// The Nyquist bin of an even-length transform maps to `-fs/2`.
pub fn bin_frequency(k: usize, n: usize, fs: f64) -> f64 {
    let k = k as f64;
    let n_f = n as f64;
    if k < n_f / 2.0 {
        k * fs / n_f
    } else {
        (k - n_f) * fs / n_f
    }
}

pub fn bin_frequencies(n: usize, fs: f64) -> Vec<f64> {
    (0..n).map(|k| bin_frequency(k, n, fs)).collect()
}

/// Multiplies the waveform spectrum by `response(f)`.
///
/// For real-valued domains the response is made Hermitian: `response` is
/// evaluated at `|f|` and conjugated for negative frequencies.
pub fn apply_response<F>(wave: &SampledWaveform, response: F) -> SampledWaveform
where
    F: Fn(f64) -> Complex64,
{
    let n = wave.len();
    let fs = wave.sample_rate_hz();
    let mut spec = fft(wave.samples());
    let real = wave.domain().is_real();
    for (k, bin) in spec.iter_mut().enumerate() {
        let f = bin_frequency(k, n, fs);
        let h = if real && f < 0.0 {
            response(-f).conj()
        } else {
            response(f)
        };
        *bin *= h;
    }
    wave.with_samples(ifft(&spec))
}

/// Multiplies the waveform spectrum by a response given directly on the DFT
/// grid (`grid[k]` applies to bin `k`).
pub fn apply_grid(wave: &SampledWaveform, grid: &[Complex64]) -> SampledWaveform {
    debug_assert_eq!(grid.len(), wave.len());
    let mut spec = fft(wave.samples());
    spec.iter_mut().zip(grid).for_each(|(x, h)| *x *= h);
    wave.with_samples(ifft(&spec))
}

/// Circular delay by `delay_s` seconds (fractional delays via a linear phase
/// ramp). Positive values delay the signal.
pub fn delay(wave: &SampledWaveform, delay_s: f64) -> SampledWaveform {
    if delay_s == 0.0 {
        return wave.clone();
    }
    let n = wave.len();
    let fs = wave.sample_rate_hz();
    let mut spec = fft(wave.samples());
    for (k, bin) in spec.iter_mut().enumerate() {
        let f = bin_frequency(k, n, fs);
        // The Nyquist bin of a real signal cannot carry a phase; leave it be.
        if n.is_multiple_of(2) && k == n / 2 {
            *bin *= (2.0 * PI * f * delay_s).cos();
            continue;
        }
        *bin *= Complex64::from_polar(1.0, -2.0 * PI * f * delay_s);
    }
    wave.with_samples(ifft(&spec))
}

/// Analytic (one-sided) version of a real signal: negative frequencies
/// removed, positive frequencies doubled.
pub fn analytic(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut spec = fft(samples);
    for (k, bin) in spec.iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
            continue;
        }
        if k < n.div_ceil(2) {
            *bin *= 2.0;
        } else {
            *bin = Complex64::new(0.0, 0.0);
        }
    }
    ifft(&spec)
}

/// Single-bin DFT at an arbitrary frequency, normalized by the record
/// length. A real tone `A cos(2 pi f t + phi)` on an integer number of cycles
/// yields `A/2 * exp(j phi)` at `+f`.
pub fn single_bin(wave: &SampledWaveform, freq_hz: f64) -> Complex64 {
    let fs = wave.sample_rate_hz();
    let step = -2.0 * PI * freq_hz / fs;
    let sum: Complex64 = wave
        .samples()
        .iter()
        .enumerate()
        .map(|(n, x)| x * Complex64::from_polar(1.0, step * n as f64))
        .sum();
    sum / wave.len() as f64
}

/// Amplitude and phase of a real tone at `freq_hz`.
pub fn tone(wave: &SampledWaveform, freq_hz: f64) -> Complex64 {
    let c = single_bin(wave, freq_hz);
    if wave.domain().is_real() && freq_hz != 0.0 {
        c * 2.0
    } else {
        c
    }
}

/// Periodogram: `(frequency, |X_k|^2 / N^2)` for each bin in FFT order.
pub fn periodogram(wave: &SampledWaveform) -> Vec<(f64, f64)> {
    let n = wave.len();
    let fs = wave.sample_rate_hz();
    let norm = 1.0 / (n as f64 * n as f64);
    fft(wave.samples())
        .iter()
        .enumerate()
        .map(|(k, x)| (bin_frequency(k, n, fs), x.norm_sqr() * norm))
        .collect()
}

/// Fraction of the total energy lying at `|f| > limit_hz`.
pub fn energy_fraction_above(wave: &SampledWaveform, limit_hz: f64) -> f64 {
    let psd = periodogram(wave);
    let total: f64 = psd.iter().map(|(_, p)| p).sum();
    if total == 0.0 {
        return 0.0;
    }
    psd.iter()
        .filter(|(f, _)| f.abs() > limit_hz)
        .map(|(_, p)| p)
        .sum::<f64>()
        / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigcore::Domain;

    fn cosine(n: usize, fs: f64, f: f64, amp: f64, phase: f64) -> SampledWaveform {
        let x: Vec<f64> = (0..n)
            .map(|i| amp * (2.0 * PI * f * i as f64 / fs + phase).cos())
            .collect();
        SampledWaveform::from_real(fs, &x, Domain::Electrical).unwrap()
    }

    #[test]
    fn fft_roundtrip() {
        let x: Vec<Complex64> = (0..37)
            .map(|i| Complex64::new(i as f64, -(i as f64) / 3.0))
            .collect();
        let y = ifft(&fft(&x));
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn tone_measurement() {
        let w = cosine(1000, 100.0, 7.0, 1.5, 0.3);
        let t = tone(&w, 7.0);
        assert!((t.norm() - 1.5).abs() < 1e-12);
        assert!((t.arg() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn fractional_delay_shifts_phase() {
        let w = cosine(1000, 100.0, 7.0, 1.0, 0.0);
        let d = delay(&w, 0.01);
        let phase = tone(&d, 7.0).arg();
        assert!((phase + 2.0 * PI * 7.0 * 0.01).abs() < 1e-9);
    }

    #[test]
    fn analytic_signal_of_cosine_is_complex_exponential() {
        let w = cosine(64, 64.0, 5.0, 1.0, 0.0);
        let z = analytic(w.samples());
        for (i, s) in z.iter().enumerate() {
            let e = Complex64::from_polar(1.0, 2.0 * PI * 5.0 * i as f64 / 64.0);
            assert!((s - e).norm() < 1e-12);
        }
    }
}
