use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feed-forward equalizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfeConfig {
    /// Number of T/2-spaced taps (odd).
    pub taps: usize,
    pub step_size: f64,
    /// Fraction of the frame used for data-aided training.
    pub train_fraction: f64,
    /// Passes of LMS over the training span.
    #[serde(default = "default_passes")]
    pub passes: usize,
}

fn default_passes() -> usize {
    2
}

impl Default for FfeConfig {
    fn default() -> Self {
        FfeConfig {
            taps: 101,
            step_size: 1e-3,
            train_fraction: 0.2,
            passes: default_passes(),
        }
    }
}

/// Trained equalizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualizerState {
    pub taps: Vec<f64>,
    pub step_size: f64,
    pub training_symbols: usize,
    pub converged: bool,
    /// Mean-squared error over the last tenth of the final training pass.
    pub final_mse: f64,
}

impl EqualizerState {
    pub fn tap_count(&self) -> usize {
        self.taps.len()
    }
}

#[inline]
fn output(w: &[f64], x: &[f64], k: usize) -> f64 {
    let n = x.len();
    let c = w.len() / 2;
    // Tap j multiplies sample 2k + c - j (circular).
    let base = 2 * k + n * (c / n + 1) + c;
    w.iter()
        .enumerate()
        .map(|(j, wj)| wj * x[(base - j) % n])
        .sum()
}

/// LMS-trained T/2-spaced FFE. `received` holds 2 samples per symbol aligned
/// so sample `2k` is the center of symbol `k`; `reference` holds the
/// transmitted symbol amplitudes. Before equalization the symbol-center
/// samples are matched to the reference mean and RMS. The record is treated
/// as periodic.
pub fn ffe_train_apply(
    received: &[f64],
    reference: &[f64],
    cfg: &FfeConfig,
) -> Result<(Vec<f64>, EqualizerState)> {
    if cfg.taps.is_multiple_of(2) || cfg.taps == 0 {
        return Err(Error::param(format!(
            "FFE tap count must be odd, got {}",
            cfg.taps
        )));
    }
    if !(cfg.step_size >= 0.0 && cfg.step_size.is_finite()) {
        return Err(Error::param("FFE step size must be finite and >= 0"));
    }
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction <= 1.0) {
        return Err(Error::param("training fraction must lie in (0, 1]"));
    }
    let n_sym = received.len() / 2;
    if !received.len().is_multiple_of(2) || n_sym == 0 {
        return Err(Error::param(
            "FFE input must hold an even number of samples",
        ));
    }
    if reference.len() != n_sym {
        return Err(Error::param(format!(
            "{} reference symbols for {n_sym} received symbols",
            reference.len()
        )));
    }
    let train = ((n_sym as f64 * cfg.train_fraction).round() as usize).clamp(1, n_sym);

    let mean = received.iter().sum::<f64>() / received.len() as f64;
    // Scale from the symbol-center samples.
    let rms_x = (received
        .iter()
        .step_by(2)
        .map(|v| (v - mean).powi(2))
        .sum::<f64>()
        / n_sym as f64)
        .sqrt();
    let mean_ref = reference.iter().sum::<f64>() / n_sym as f64;
    let rms_ref = (reference
        .iter()
        .map(|v| (v - mean_ref).powi(2))
        .sum::<f64>()
        / n_sym as f64)
        .sqrt();
    if !(rms_x > 0.0) {
        return Err(Error::param("FFE input has no signal"));
    }
    let x: Vec<f64> = received
        .iter()
        .map(|v| (v - mean) * rms_ref / rms_x + mean_ref)
        .collect();

    let mut w = vec![0.0; cfg.taps];
    w[cfg.taps / 2] = 1.0;
    let c = cfg.taps / 2;
    let n = x.len();
    let tenth = (train / 10).max(1);
    let mut initial_mse = None;
    let mut final_mse = 0.0;
    for _ in 0..cfg.passes.max(1) {
        let mut tail = 0.0;
        let mut head = 0.0;
        for k in 0..train {
            let y = output(&w, &x, k);
            let e = reference[k] - y;
            if k < tenth {
                head += e * e;
            }
            if k >= train - tenth {
                tail += e * e;
            }
            if cfg.step_size > 0.0 {
                let base = 2 * k + n * (c / n + 1) + c;
                let mu_e = cfg.step_size * e;
                for (j, wj) in w.iter_mut().enumerate() {
                    *wj += mu_e * x[(base - j) % n];
                }
            }
        }
        if initial_mse.is_none() {
            initial_mse = Some(head / tenth as f64);
        }
        final_mse = tail / tenth as f64;
        if !final_mse.is_finite() {
            break;
        }
    }
    let initial_mse = initial_mse.unwrap_or(final_mse);
    if !final_mse.is_finite() || final_mse > 10.0 * initial_mse {
        return Err(Error::Divergence {
            initial_mse,
            final_mse,
        });
    }
    let y: Vec<f64> = (0..n_sym).map(|k| output(&w, &x, k)).collect();
    Ok((
        y,
        EqualizerState {
            taps: w,
            step_size: cfg.step_size,
            training_symbols: train,
            converged: final_mse <= initial_mse,
            final_mse,
        },
    ))
}
