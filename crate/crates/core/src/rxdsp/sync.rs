use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sigcore::spectrum;
use crate::sigcore::{resample, SampledWaveform};
use crate::txdsp::rrc_upsample;

/// Normalized correlation below which no frame is declared.
pub const SYNC_THRESHOLD: f64 = 0.5;

/// Frame alignment result.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncResult {
    /// Waveform at 2 samples per symbol, circularly shifted so the first
    /// preamble symbol sits at sample 0.
    pub aligned: SampledWaveform,
    /// Estimated delay of the frame start, in samples at 2 samples/symbol.
    pub delay_samples: f64,
    /// Normalized correlation at the peak.
    pub peak_correlation: f64,
}

impl SyncResult {
    pub fn delay_symbols(&self) -> f64 {
        self.delay_samples / 2.0
    }
}

/// Locates the known preamble (the first symbols of the periodic frame) by
/// circular cross-correlation against its RRC-shaped replica and re-times
/// the record to a 2 samples/symbol grid starting at the frame.
pub fn synchronize(
    received: &SampledWaveform,
    preamble: &[f64],
    symbol_rate_hz: f64,
    rolloff: f64,
) -> Result<SyncResult> {
    if preamble.is_empty() {
        return Err(Error::param("empty preamble"));
    }
    let two_sps = resample(received, 2.0 * symbol_rate_hz)?;
    let n = two_sps.len();
    if 2 * preamble.len() > n {
        return Err(Error::param("preamble longer than the received record"));
    }
    let mean = two_sps.samples().iter().map(|s| s.re).sum::<f64>() / n as f64;
    let x: Vec<Complex64> = two_sps
        .samples()
        .iter()
        .map(|s| Complex64::new(s.re - mean, 0.0))
        .collect();

    let mut pre_symbols = vec![0.0; n / 2];
    pre_symbols[..preamble.len()].copy_from_slice(preamble);
    let reference = rrc_upsample(&pre_symbols, symbol_rate_hz, 2, rolloff)?;
    // Keep only the preamble's own span so payload energy does not leak in.
    let window = 2 * preamble.len();
    let r: Vec<Complex64> = reference
        .samples()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if i < window {
                *v
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();

    let xs = spectrum::fft(&x);
    let rs = spectrum::fft(&r);
    let prod: Vec<Complex64> = xs.iter().zip(&rs).map(|(a, b)| a * b.conj()).collect();
    let corr: Vec<f64> = spectrum::ifft(&prod).iter().map(|c| c.re).collect();

    let (k, peak) =
        corr.iter().enumerate().fold(
            (0, f64::MIN),
            |(bk, bv), (i, &v)| if v > bv { (i, v) } else { (bk, bv) },
        );
    let r_energy: f64 = r.iter().map(|v| v.norm_sqr()).sum();
    let x_energy: f64 = (0..window).map(|i| x[(k + i) % n].norm_sqr()).sum();
    let normalized = if r_energy > 0.0 && x_energy > 0.0 {
        peak / (r_energy * x_energy).sqrt()
    } else {
        0.0
    };
    if !(normalized >= SYNC_THRESHOLD) {
        return Err(Error::Sync(format!(
            "correlation peak {normalized:.3} below threshold {SYNC_THRESHOLD}"
        )));
    }
    let (ym, y0, yp) = (corr[(k + n - 1) % n], corr[k], corr[(k + 1) % n]);
    let denom = ym - 2.0 * y0 + yp;
    let frac = if denom.abs() > 0.0 {
        0.5 * (ym - yp) / denom
    } else {
        0.0
    };
    let frac = frac.clamp(-0.5, 0.5);
    let mut delay = k as f64 + frac;
    if delay > n as f64 / 2.0 {
        delay -= n as f64;
    }
    let advanced = spectrum::delay(&two_sps, -delay / two_sps.sample_rate_hz());
    Ok(SyncResult {
        aligned: advanced,
        delay_samples: delay,
        peak_correlation: normalized,
    })
}
