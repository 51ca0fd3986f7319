//! Root-raised-cosine pulse design.

use std::f64::consts::PI;

use crate::error::{Error, Result};

fn check_rolloff(rolloff: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rolloff) {
        return Err(Error::param(format!("roll-off {rolloff} outside [0, 1]")));
    }
    Ok(())
}

/// Root-raised-cosine FIR taps spanning `span_symbols` symbols at
/// `samples_per_symbol` samples per symbol.
///
/// The tap count is always odd with the pulse peak at the center tap. Taps
/// are scaled so that they sum to `samples_per_symbol`, i.e. the response
/// divided by the oversampling factor is 1 at DC.
pub fn design_rrc(
    rolloff: f64,
    span_symbols: usize,
    samples_per_symbol: usize,
) -> Result<Vec<f64>> {
    check_rolloff(rolloff)?;
    if span_symbols == 0 || samples_per_symbol == 0 {
        return Err(Error::param("RRC span and oversampling must be positive"));
    }
    let half = span_symbols * samples_per_symbol / 2;
    let sps = samples_per_symbol as f64;
    let mut taps: Vec<f64> = (0..=2 * half)
        .map(|i| rrc_impulse((i as f64 - half as f64) / sps, rolloff))
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t *= sps / sum);
    Ok(taps)
}

/// Continuous RRC impulse response at time `t` (in symbol periods), with unit
/// DC spectral gain.
pub fn rrc_impulse(t: f64, rolloff: f64) -> f64 {
    let b = rolloff;
    if t.abs() < 1e-12 {
        return 1.0 + b * (4.0 / PI - 1.0);
    }
    if b > 0.0 && (t.abs() - 1.0 / (4.0 * b)).abs() < 1e-9 {
        let x = PI / (4.0 * b);
        return b / 2f64.sqrt() * ((1.0 + 2.0 / PI) * x.sin() + (1.0 - 2.0 / PI) * x.cos());
    }
    let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
    let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
    num / den
}

/// Closed-form RRC amplitude spectrum at normalized frequency `f·T`,
/// normalized to 1 at DC.
pub fn rrc_spectrum(f_norm: f64, rolloff: f64) -> f64 {
    let f = f_norm.abs();
    let lo = (1.0 - rolloff) / 2.0;
    let hi = (1.0 + rolloff) / 2.0;
    if f <= lo {
        1.0
    } else if f > hi {
        0.0
    } else {
        (0.5 * (1.0 + (PI / rolloff * (f - lo)).cos())).sqrt()
    }
}
