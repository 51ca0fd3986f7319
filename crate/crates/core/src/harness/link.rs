use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::config::LinkConfig;
use crate::channel::{obpf, optical_amplify, propagate};
use crate::error::{Error, Result, ResultExt, Stage};
use crate::rng::{stream, Seed};
use crate::rxdsp::{
    digitize, evaluate_metrics, ffe_train_apply, photodetect, synchronize, EqualizerState,
    MetricsReport,
};
use crate::sigcore::{nmse_db_slices, resample, ResponseTable, SampledWaveform};
use crate::txdsp::{
    apply_volterra, band_split, decimate, fit_volterra, linear_preemphasis, rrc_matched_filter,
    rrc_upsample, VolterraKernel,
};

fn integer_hz(rate_hz: f64, what: &str) -> Result<u64> {
    let r = rate_hz.round();
    if !(r >= 1.0) || (rate_hz - r).abs() > 1e-3 {
        return Err(Error::Config(format!(
            "{what} {rate_hz} Hz must be a whole number of Hz"
        )));
    }
    Ok(r as u64)
}

fn is_smooth(mut k: usize) -> bool {
    for p in [2, 3, 5, 7] {
        while k.is_multiple_of(p) {
            k /= p;
        }
    }
    k == 1
}

/// Smallest length `>= requested` for which every sample rate in the chain
/// holds a whole number of samples over the periodic record, chosen so the
/// FFT sizes stay 7-smooth.
pub fn commensurate_length(cfg: &LinkConfig, requested: usize) -> Result<usize> {
    let b = integer_hz(cfg.symbol_rate_hz(), "symbol rate")?;
    let mut q: u64 = 1;
    for (name, fs) in [
        ("analog rate", cfg.frontend.analog_rate_hz),
        ("AWG rate", cfg.band_plan.awg_rate_hz),
        ("DAC rate", cfg.frontend.dac.sample_rate_hz),
        ("digitizer rate", cfg.rx.digitizer.sample_rate_hz),
    ] {
        let f = integer_hz(fs, name)?;
        q = q.lcm(&(b / b.gcd(&f)));
    }
    let q = q as usize;
    if q > requested.max(1) {
        return Err(Error::Config(format!(
            "symbol rate {} GBd needs frames of at least {q} symbols",
            cfg.symbol_rate_gbd
        )));
    }
    let mut k = requested.div_ceil(q);
    while !is_smooth(k) {
        k += 1;
    }
    Ok(q * k)
}

/// Frame length actually simulated for `cfg`.
pub fn frame_length(cfg: &LinkConfig) -> Result<usize> {
    commensurate_length(cfg, cfg.sequence_length_symbols)
}

/// Transmit end-to-end response normalized to unity at DC, tabulated for
/// pre-emphasis at the analog rate.
fn tx_response_table(cfg: &LinkConfig) -> Result<ResponseTable> {
    let fe = &cfg.frontend;
    let plan = &cfg.band_plan;
    let dc = fe.linear_response(plan, 0.0).norm();
    if !(dc > 0.0) {
        return Err(Error::param("transmitter has no DC response"));
    }
    let half = fe.analog_rate_hz / 2.0;
    let points = 2049;
    let freqs = (0..points)
        .map(|i| half * i as f64 / (points - 1) as f64)
        .collect();
    ResponseTable::sample(freqs, |f| fe.linear_response(plan, f) / dc)
}

fn transmit(cfg: &LinkConfig, symbols: &[f64], seed: Seed) -> Result<SampledWaveform> {
    let b = cfg.symbol_rate_hz();
    let shaped = rrc_upsample(symbols, b, 2, cfg.tx.rrc_rolloff).at(Stage::TxDsp)?;
    let mut wide = resample(&shaped, cfg.frontend.analog_rate_hz).at(Stage::TxDsp)?;
    if cfg.tx.preemphasis_max_boost_db > 0.0 {
        let table = tx_response_table(cfg).at(Stage::TxDsp)?;
        wide =
            linear_preemphasis(&wide, &table, cfg.tx.preemphasis_max_boost_db).at(Stage::TxDsp)?;
    }
    let target = cfg.tx.drive_rms_vpi * cfg.frontend.mzm.v_pi_volts;
    let rms = wide.rms();
    if !(rms > 0.0) {
        return Err(Error::param("transmit waveform is silent").at(Stage::TxDsp));
    }
    let wide = wide.scaled(target / (cfg.frontend.dc_gain() * rms));
    let (lower, upper) = band_split(&wide, &cfg.band_plan).at(Stage::TxDsp)?;
    let drive = cfg
        .frontend
        .electrical(&lower, &upper)
        .at(Stage::Frontend)?;
    cfg.frontend.optical(&drive, seed).at(Stage::Frontend)
}

fn transport(cfg: &LinkConfig, field: SampledWaveform, seed: Seed) -> Result<SampledWaveform> {
    let ch = &cfg.channel;
    let lambda = cfg.frontend.laser.wavelength_nm;
    let mut x = field;
    if let Some(f) = &ch.fiber {
        x = propagate(&x, f, lambda)?;
    }
    if ch.extra_loss_db > 0.0 {
        x = x.scaled(10f64.powf(-ch.extra_loss_db / 20.0));
    }
    if let Some(a) = &ch.amplifier {
        x = optical_amplify(&x, a, seed)?;
    }
    if let Some(spec) = &ch.obpf {
        let mut spec = spec.clone();
        if ch.obpf_auto_cd_trim {
            spec.cd_trim_ps_nm = match &ch.fiber {
                Some(f) => f.accumulated_dispersion_ps_nm(lambda)?,
                None => 0.0,
            };
        }
        let table = spec.response_table(
            lambda,
            cfg.rx.photodiode.bandwidth_shape,
            x.sample_rate_hz(),
        )?;
        x = obpf(&x, &table)?;
    }
    Ok(x)
}

fn detect(cfg: &LinkConfig, field: &SampledWaveform, seed: Seed) -> Result<SampledWaveform> {
    let i = photodetect(field, &cfg.rx.photodiode, seed)?;
    digitize(&i, &cfg.rx.digitizer, seed)
}

/// Received waveform re-timed to 2 samples/symbol and matched filtered.
fn front_of_receiver(
    cfg: &LinkConfig,
    symbols: &[f64],
    tx_symbols: &[f64],
    seed: Seed,
) -> Result<(SampledWaveform, f64, f64)> {
    let optical = transmit(cfg, tx_symbols, seed)?;
    let received = transport(cfg, optical, seed).at(Stage::Channel)?;
    let digitized = detect(cfg, &received, seed).at(Stage::RxDsp)?;
    let b = cfg.symbol_rate_hz();
    let preamble = cfg.rx.preamble_symbols.min(symbols.len() / 4).max(1);
    let sync =
        synchronize(&digitized, &symbols[..preamble], b, cfg.tx.rrc_rolloff).at(Stage::RxDsp)?;
    let mf = rrc_matched_filter(&sync.aligned, b, cfg.tx.rrc_rolloff).at(Stage::RxDsp)?;
    Ok((mf, sync.delay_symbols(), sync.peak_correlation))
}

/// Learns the pre-distorter on a separately seeded frame sent through the
/// link without pre-distortion (indirect learning: the post-inverse of the
/// link is used as the pre-inverse).
fn train_dpd(cfg: &LinkConfig, seed: Seed) -> Result<(VolterraKernel, f64)> {
    let Some(dpd) = &cfg.tx.dpd else {
        return Err(Error::param("pre-distortion is not configured"));
    };
    let tseed = seed.derive(stream::DPD_TRAINING);
    let n = commensurate_length(cfg, dpd.training_symbols).at(Stage::Config)?;
    let frame = cfg
        .modulation
        .frame(n, cfg.ccdm_block_length, tseed)
        .at(Stage::Shaping)?;
    let x = frame.levels();
    let (mf, _, _) = front_of_receiver(cfg, &x, &x, tseed)?;
    let y = normalize_to(&decimate(&mf, 2, 0), &x);
    let (kernel, report) = fit_volterra(&x, &y, &dpd.structure).at(Stage::TxDsp)?;
    Ok((kernel, report.training_nmse_db))
}

fn normalize_to(y: &[f64], reference: &[f64]) -> Vec<f64> {
    let stats = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let s = (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
        (m, s)
    };
    let (my, sy) = stats(y);
    let (mr, sr) = stats(reference);
    let g = if sy > 0.0 { sr / sy } else { 1.0 };
    y.iter().map(|v| (v - my) * g + mr).collect()
}

/// Detailed outcome of one end-to-end run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkOutcome {
    pub report: MetricsReport,
    pub frame_symbols: usize,
    pub evaluated_symbols: usize,
    pub sync_delay_symbols: f64,
    pub sync_peak_correlation: f64,
    pub equalizer: EqualizerState,
    /// Fit quality of the pre-distorter on its training frame.
    pub dpd_training_nmse_db: Option<f64>,
    /// Symbol NMSE after equalization over the evaluated span.
    pub equalized_nmse_db: f64,
}

/// Simulates the link described by `cfg` and evaluates the symbols after
/// the equalizer's training span.
pub fn run_link_traced(cfg: &LinkConfig) -> Result<LinkOutcome> {
    cfg.validate().at(Stage::Config)?;
    let seed = cfg.seed();
    let n = frame_length(cfg).at(Stage::Config)?;
    let frame = cfg
        .modulation
        .frame(n, cfg.ccdm_block_length, seed)
        .at(Stage::Shaping)?;
    let symbols = frame.levels();
    let (tx_symbols, dpd_nmse) = match &cfg.tx.dpd {
        Some(_) => {
            let (kernel, nmse) = train_dpd(cfg, seed)?;
            (
                apply_volterra(&symbols, &kernel).at(Stage::TxDsp)?,
                Some(nmse),
            )
        }
        None => (symbols.clone(), None),
    };
    let (mf, delay, peak) = front_of_receiver(cfg, &symbols, &tx_symbols, seed)?;
    let (soft, eq) = ffe_train_apply(&mf.real_parts(), &symbols, &cfg.rx.ffe).at(Stage::RxDsp)?;
    let start = eq.training_symbols;
    let tail = frame.slice(start..n);
    let report = evaluate_metrics(
        &soft[start..],
        &tail,
        cfg.symbol_rate_gbd,
        cfg.modulation.bitrate_formula(),
        &cfg.rx.metrics,
    )
    .at(Stage::Metrics)?;
    let equalized_nmse_db = nmse_db_slices(&symbols[start..], &soft[start..]).at(Stage::Metrics)?;
    Ok(LinkOutcome {
        report,
        frame_symbols: n,
        evaluated_symbols: n - start,
        sync_delay_symbols: delay,
        sync_peak_correlation: peak,
        equalizer: eq,
        dpd_training_nmse_db: dpd_nmse,
        equalized_nmse_db,
    })
}

/// End-to-end run: shaping, transmitter DSP, front end, channel, receiver
/// and metrology.
pub fn run_link(cfg: &LinkConfig) -> Result<MetricsReport> {
    run_link_traced(cfg).map(|o| o.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Band;

    #[test]
    fn frame_lengths_are_commensurate() {
        let c = LinkConfig::c_band_216g();
        let n = commensurate_length(&c, 1 << 16).unwrap();
        assert!(n >= 1 << 16);
        assert_eq!(n % 27, 0);
        for fs in [512e9, 256e9, 432e9] {
            let m = n as f64 * fs / 216e9;
            assert_eq!(m, m.round());
        }
        let mut r = c.clone();
        r.symbol_rate_gbd = 208.0;
        assert_eq!(commensurate_length(&r, 4096).unwrap() % 13, 0);
    }

    #[test]
    fn stage_is_reported() {
        let mut c = LinkConfig::ideal(Band::C);
        c.tx.drive_rms_vpi = 0.0;
        let e = run_link(&c).unwrap_err();
        assert_eq!(e.stage(), Some(Stage::Config));
    }
}
