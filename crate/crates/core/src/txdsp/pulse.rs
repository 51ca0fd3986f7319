use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sigcore::spectrum::{self, bin_frequency};
use crate::sigcore::{rrc_spectrum, Domain, ResponseTable, SampledWaveform};

fn check_rolloff(rolloff: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rolloff) {
        return Err(Error::param(format!("roll-off {rolloff} outside [0, 1]")));
    }
    Ok(())
}

/// Pulse-shapes `symbols` with a root-raised-cosine filter at
/// `samples_per_symbol` samples per symbol.
///
/// The filter is applied on the periodic record in the frequency domain, so
/// the pulse has infinite span and wraps around the record edges. Each
/// symbol contributes `a · p(t − kT)` where `p` is the unit-DC-gain RRC
/// impulse.
pub fn rrc_upsample(
    symbols: &[f64],
    symbol_rate_hz: f64,
    samples_per_symbol: usize,
    rolloff: f64,
) -> Result<SampledWaveform> {
    check_rolloff(rolloff)?;
    if symbols.is_empty() || samples_per_symbol == 0 {
        return Err(Error::param(
            "need at least one symbol and one sample per symbol",
        ));
    }
    if !(symbol_rate_hz > 0.0) {
        return Err(Error::param("symbol rate must be positive"));
    }
    let n = symbols.len();
    let sps = samples_per_symbol;
    let x: Vec<Complex64> = symbols.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    let s = spectrum::fft(&x);
    let m = n * sps;
    // Zero-stuffing repeats the symbol spectrum sps times across the new
    // band; the RRC (scaled by sps) selects the baseband copy.
    let spec: Vec<Complex64> = (0..m)
        .map(|k| {
            let f_norm = bin_frequency(k, m, sps as f64);
            s[k % n] * (sps as f64 * rrc_spectrum(f_norm, rolloff))
        })
        .collect();
    let y = spectrum::ifft(&spec);
    SampledWaveform::new(
        symbol_rate_hz * sps as f64,
        y.into_iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
        Domain::Electrical,
    )
}

/// Receive-side RRC matched filter (unit DC gain). Sampling the output at
/// the symbol instants of an [`rrc_upsample`] waveform returns the symbols.
pub fn rrc_matched_filter(
    wave: &SampledWaveform,
    symbol_rate_hz: f64,
    rolloff: f64,
) -> Result<SampledWaveform> {
    check_rolloff(rolloff)?;
    if !(symbol_rate_hz > 0.0) {
        return Err(Error::param("symbol rate must be positive"));
    }
    Ok(spectrum::apply_response(wave, |f| {
        Complex64::new(rrc_spectrum(f / symbol_rate_hz, rolloff), 0.0)
    }))
}

/// Every `step`-th real sample starting at `offset`.
pub fn decimate(wave: &SampledWaveform, step: usize, offset: usize) -> Vec<f64> {
    wave.samples()
        .iter()
        .skip(offset)
        .step_by(step.max(1))
        .map(|s| s.re)
        .collect()
}

/// Divides the waveform spectrum by `end_to_end_response`, limiting the
/// gain magnitude to `max_boost_db`. A limit of 0 dB disables the
/// pre-emphasis; `f64::INFINITY` disables clipping.
pub fn linear_preemphasis(
    wave: &SampledWaveform,
    end_to_end_response: &ResponseTable,
    max_boost_db: f64,
) -> Result<SampledWaveform> {
    if !(max_boost_db >= 0.0) {
        return Err(Error::param(format!(
            "maximum boost must be >= 0 dB, got {max_boost_db}"
        )));
    }
    if max_boost_db == 0.0 {
        return Ok(wave.clone());
    }
    let n = wave.len();
    let fs = wave.sample_rate_hz();
    let nyquist = fs / 2.0;
    let fr = end_to_end_response.freqs_hz();
    let (lo, hi) = (fr[0], fr[fr.len() - 1]);
    // A single-point table is a constant and covers every frequency.
    let covered = fr.len() == 1
        || if end_to_end_response.is_one_sided() {
            lo <= 0.0 && hi >= nyquist * (1.0 - 1e-9)
        } else {
            lo <= -nyquist * (1.0 - 1e-9) && hi >= nyquist * (1.0 - 1e-9)
        };
    if !covered {
        return Err(Error::param(
            "pre-emphasis response table must cover [0, Nyquist]",
        ));
    }
    let max_gain = 10f64.powf(max_boost_db / 20.0);
    let mut spec = spectrum::fft(wave.samples());
    let peak = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let real = wave.domain().is_real();
    for (k, bin) in spec.iter_mut().enumerate() {
        let f = bin_frequency(k, n, fs);
        let h = if real && f < 0.0 {
            end_to_end_response.evaluate(-f).conj()
        } else {
            end_to_end_response.evaluate(f)
        };
        let mag = h.norm();
        if mag == 0.0 {
            if max_gain.is_infinite() && bin.norm() > 1e-12 * peak {
                return Err(Error::param(format!(
                    "response is zero at {f:.4e} Hz inside the signal band and clipping is disabled"
                )));
            }
            continue;
        }
        let gain = (1.0 / mag).min(max_gain);
        *bin *= Complex64::from_polar(gain, -h.arg());
    }
    Ok(wave.with_samples(spectrum::ifft(&spec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use crate::shaping::PamAlphabet;
    use crate::sigcore::{nmse_db_slices, rrc_impulse};
    use proptest::prelude::*;
    use rand::Rng;

    fn pam8_symbols(n: usize, seed: u64) -> Vec<f64> {
        let a = PamAlphabet::pam8();
        let mut rng = Seed::from(seed).rng();
        (0..n).map(|_| a.levels()[rng.random_range(0..8)]).collect()
    }

    #[test]
    fn single_symbol_gives_the_rrc_pulse() {
        let n = 256;
        let sps = 4;
        let mut x = vec![0.0; n];
        x[n / 2] = 1.0;
        let w = rrc_upsample(&x, 1.0, sps, 0.25).unwrap();
        assert_eq!(w.sample_rate_hz(), 4.0);
        for (i, s) in w.samples().iter().enumerate() {
            let t = (i as f64 - (n / 2 * sps) as f64) / sps as f64;
            // Periodic pulse: the tails are far below the tolerance.
            assert!((s.re - rrc_impulse(t, 0.25)).abs() < 1e-3, "sample {i}");
        }
    }

    #[test]
    fn round_trip_recovers_pam8() {
        let x = pam8_symbols(4096, 1);
        for rolloff in [0.01, 0.1, 0.5] {
            let w = rrc_upsample(&x, 216e9, 2, rolloff).unwrap();
            let mf = rrc_matched_filter(&w, 216e9, rolloff).unwrap();
            let y = decimate(&mf, 2, 0);
            let nmse = nmse_db_slices(&x, &y).unwrap();
            assert!(nmse <= -50.0, "rolloff {rolloff}: {nmse} dB");
        }
    }

    #[test]
    fn alternating_symbols_sit_at_half_the_symbol_rate() {
        let x: Vec<f64> = (0..512)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let w = rrc_upsample(&x, 216e9, 2, 0.01).unwrap();
        let psd = spectrum::periodogram(&w);
        let total: f64 = psd.iter().map(|(_, p)| p).sum();
        let outside: f64 = psd
            .iter()
            .filter(|(f, _)| f.abs() > 1.01 / 2.0 * 216e9)
            .map(|(_, p)| p)
            .sum();
        assert!(outside <= 1e-20 * total);
        let at_half = spectrum::tone(&w, 108e9).norm();
        assert!(at_half > 0.5);
    }

    #[test]
    fn flat_response_and_zero_boost_are_identity() {
        let x = pam8_symbols(128, 2);
        let w = rrc_upsample(&x, 1.0, 2, 0.1).unwrap();
        let flat = linear_preemphasis(&w, &ResponseTable::unity(), 20.0).unwrap();
        assert!(nmse_db_slices(w.samples(), flat.samples()).unwrap() <= -150.0);
        let rolloff =
            ResponseTable::sample(vec![0.0, 1.0], |f| Complex64::new(1.0 - 0.5 * f, 0.0)).unwrap();
        assert_eq!(linear_preemphasis(&w, &rolloff, 0.0).unwrap(), w);
    }

    #[test]
    fn first_order_rolloff_is_flattened() {
        // H(f) = 1 / (1 + j f / fc) with |H| = -6 dB at the band edge.
        let band = 100e9;
        let fc = band / 3f64.sqrt();
        let h = |f: f64| Complex64::new(1.0, f / fc).inv();
        let table =
            ResponseTable::sample((0..=512).map(|k| k as f64 * 0.5e9).collect(), h).unwrap();
        assert!((20.0 * h(band).norm().log10() + 6.02).abs() < 0.01);
        let x = pam8_symbols(2048, 3);
        let w = rrc_upsample(&x, 200e9, 2, 0.0).unwrap();
        let pre = linear_preemphasis(&w, &table, 20.0).unwrap();
        let out = spectrum::apply_response(&pre, h);
        let (a, b) = (spectrum::fft(w.samples()), spectrum::fft(out.samples()));
        for k in 1..a.len() {
            let f = bin_frequency(k, a.len(), 400e9);
            if f.abs() < band * 0.99 && a[k].norm() > 1e-9 {
                let ripple = 20.0 * (b[k].norm() / a[k].norm()).log10();
                assert!(ripple.abs() <= 0.5, "{f}: {ripple} dB");
            }
        }
    }

    #[test]
    fn zero_response_without_clipping_is_an_error() {
        let x = pam8_symbols(64, 4);
        let w = rrc_upsample(&x, 1.0, 2, 0.5).unwrap();
        let notch = ResponseTable::sample(vec![0.0, 1.0], |_| Complex64::new(0.0, 0.0)).unwrap();
        assert!(linear_preemphasis(&w, &notch, f64::INFINITY).is_err());
        assert!(linear_preemphasis(&w, &notch, 10.0).is_ok());
        let short = ResponseTable::sample(vec![0.0, 0.2], |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(linear_preemphasis(&w, &short, 10.0).is_err());
    }

    proptest! {
        #[test]
        fn upsampling_is_linear(
            x in proptest::collection::vec(-1.0f64..1.0, 40),
            y in proptest::collection::vec(-1.0f64..1.0, 40),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let lhs = rrc_upsample(&mix, 1.0, 3, 0.2).unwrap();
            let ux = rrc_upsample(&x, 1.0, 3, 0.2).unwrap();
            let uy = rrc_upsample(&y, 1.0, 3, 0.2).unwrap();
            for ((l, p), q) in lhs.samples().iter().zip(ux.samples()).zip(uy.samples()) {
                prop_assert!((l.re - (a * p.re + b * q.re)).abs() <= 1e-10);
            }
        }
    }
}
