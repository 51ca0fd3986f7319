use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shaping::{PamAlphabet, SymbolFrame};

/// LLR magnitude limit applied before GMI accumulation.
pub const LLR_CAP: f64 = 50.0;

/// Overhead of the optional outer hard-decision code.
pub const OUTER_FEC_OVERHEAD: f64 = 0.0079;

fn check_lengths(soft: &[f64], frame: &SymbolFrame) -> Result<()> {
    if soft.len() != frame.len() {
        return Err(Error::param(format!(
            "{} soft symbols for a frame of {} symbols",
            soft.len(),
            frame.len()
        )));
    }
    if soft.is_empty() {
        return Err(Error::param("no symbols to evaluate"));
    }
    Ok(())
}

fn nearest(y: f64, levels: &[f64]) -> usize {
    let mut best = 0;
    for (i, l) in levels.iter().enumerate() {
        if (y - l).abs() < (y - levels[best]).abs() {
            best = i;
        }
    }
    best
}

/// Decision-directed noise variance: mean squared distance from each soft
/// symbol to its nearest level.
pub fn estimate_noise_variance(soft: &[f64], alphabet: &PamAlphabet) -> Result<f64> {
    if soft.is_empty() {
        return Err(Error::param("no symbols to evaluate"));
    }
    let lv = alphabet.levels();
    let v = soft
        .iter()
        .map(|&y| (y - lv[nearest(y, lv)]).powi(2))
        .sum::<f64>()
        / soft.len() as f64;
    // Keep the variance usable for noiseless input.
    Ok(v.max(1e-12 * alphabet.levels().iter().map(|l| l * l).sum::<f64>() / lv.len() as f64))
}

/// MAP hard decisions: `argmax_x log P(x) − (y − x)² / (2σ²)`.
/// With equal priors this is the nearest level.
pub fn decide_map(
    soft: &[f64],
    alphabet: &PamAlphabet,
    priors: &[f64],
    noise_variance: f64,
) -> Result<Vec<usize>> {
    if !(noise_variance > 0.0 && noise_variance.is_finite()) {
        return Err(Error::param(format!(
            "noise variance must be positive, got {noise_variance}"
        )));
    }
    if priors.len() != alphabet.size() {
        return Err(Error::param("prior does not match the alphabet"));
    }
    let lv = alphabet.levels();
    let uniform = priors.windows(2).all(|w| w[0] == w[1]);
    if uniform {
        return Ok(soft.iter().map(|&y| nearest(y, lv)).collect());
    }
    let lp: Vec<f64> = priors.iter().map(|p| p.ln()).collect();
    Ok(soft
        .iter()
        .map(|&y| {
            let mut best = 0;
            let mut best_m = f64::NEG_INFINITY;
            for (i, (&x, &l)) in lv.iter().zip(&lp).enumerate() {
                let m = l - (y - x).powi(2) / (2.0 * noise_variance);
                if m > best_m {
                    best_m = m;
                    best = i;
                }
            }
            best
        })
        .collect())
}

/// Hard decisions and bit error rate against the frame's labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    pub ber: f64,
    pub bit_errors: usize,
    pub bits: usize,
    pub decisions: Vec<usize>,
}

/// MAP decisions under the frame prior (noise variance estimated from the
/// decision-directed residual), then BER over the label bits.
pub fn decide_and_ber(soft: &[f64], frame: &SymbolFrame) -> Result<BerResult> {
    check_lengths(soft, frame)?;
    let a = frame.alphabet();
    let sigma2 = estimate_noise_variance(soft, a)?;
    let decisions = decide_map(soft, a, frame.distribution().probabilities(), sigma2)?;
    let m = a.label_bits();
    let bit_errors: usize = decisions
        .iter()
        .zip(frame.indices())
        .map(|(&d, &t)| (a.label(d) ^ a.label(t)).count_ones() as usize)
        .sum();
    let bits = frame.len() * m;
    Ok(BerResult {
        ber: bit_errors as f64 / bits as f64,
        bit_errors,
        bits,
        decisions,
    })
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Per-bit LLRs `log P(b=0 | y) / P(b=1 | y)` under a Gaussian channel with
/// the frame prior, ordered symbol by symbol, most significant bit first.
/// `None` estimates the variance from the decision-directed residual.
pub fn llr_compute(
    soft: &[f64],
    frame: &SymbolFrame,
    noise_variance: Option<f64>,
) -> Result<Vec<f64>> {
    check_lengths(soft, frame)?;
    let a = frame.alphabet();
    let sigma2 = match noise_variance {
        Some(v) if v > 0.0 && v.is_finite() => v,
        Some(v) => {
            return Err(Error::param(format!(
                "noise variance must be positive, got {v}"
            )))
        }
        None => estimate_noise_variance(soft, a)?,
    };
    let lv = a.levels();
    let m = a.label_bits();
    let lp: Vec<f64> = frame
        .distribution()
        .probabilities()
        .iter()
        .map(|p| p.ln())
        .collect();
    let mut out = Vec::with_capacity(soft.len() * m);
    let mut metric = vec![0.0; lv.len()];
    for &y in soft {
        for (i, x) in lv.iter().enumerate() {
            metric[i] = lp[i] - (y - x).powi(2) / (2.0 * sigma2);
        }
        for b in 0..m {
            let zero = (0..lv.len())
                .filter(|&i| a.label_bit(i, b) == 0)
                .map(|i| metric[i]);
            let one = (0..lv.len())
                .filter(|&i| a.label_bit(i, b) == 1)
                .map(|i| metric[i]);
            out.push(log_sum_exp(zero) - log_sum_exp(one));
        }
    }
    Ok(out)
}

/// GMI estimate in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmiEstimate {
    pub gmi_bits: f64,
    /// `1 − (H − GMI) / m`, clamped to [0, 1].
    pub ngmi: f64,
    /// Standard error of the GMI estimate.
    pub gmi_std_err: f64,
}

/// `GMI = H − (1/N) Σ_n Σ_i log2(1 + exp(−(1 − 2 b_ni) · LLR_ni))`.
pub fn gmi_ngmi(
    llrs: &[f64],
    transmitted_bits: &[u8],
    entropy_bits: f64,
    label_bits: usize,
) -> Result<GmiEstimate> {
    if label_bits == 0
        || llrs.len() != transmitted_bits.len()
        || !llrs.len().is_multiple_of(label_bits)
        || llrs.is_empty()
    {
        return Err(Error::param(format!(
            "{} LLRs, {} bits and {label_bits} label bits are inconsistent",
            llrs.len(),
            transmitted_bits.len()
        )));
    }
    let n = llrs.len() / label_bits;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (l, b) in llrs
        .chunks(label_bits)
        .zip(transmitted_bits.chunks(label_bits))
    {
        let d: f64 = l
            .iter()
            .zip(b)
            .map(|(&llr, &bit)| {
                let s = if bit == 0 { 1.0 } else { -1.0 };
                let z = -s * llr.clamp(-LLR_CAP, LLR_CAP);
                // log2(1 + e^z) without overflow.
                (z.max(0.0) + (-z.abs()).exp().ln_1p()) / std::f64::consts::LN_2
            })
            .sum();
        sum += d;
        sum_sq += d * d;
    }
    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0);
    let gmi = entropy_bits - mean;
    Ok(GmiEstimate {
        gmi_bits: gmi,
        ngmi: (1.0 - (entropy_bits - gmi) / label_bits as f64).clamp(0.0, 1.0),
        gmi_std_err: (var / n as f64).sqrt(),
    })
}

fn default_interpolate() -> bool {
    true
}

/// NGMI thresholds of the available code rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    /// `(code_rate, ngmi_threshold)` rows, increasing in both columns.
    pub rows: Vec<(f64, f64)>,
    #[serde(default = "default_interpolate")]
    pub interpolate: bool,
}

impl Default for RateTable {
    /// Placeholder: rates 0.60 to 0.95 in steps of 0.05, threshold = rate + 0.02.
    fn default() -> Self {
        RateTable {
            rows: (0..8)
                .map(|i| {
                    let r = (60 + 5 * i) as f64 / 100.0;
                    (r, r + 0.02)
                })
                .collect(),
            interpolate: true,
        }
    }
}

impl RateTable {
    pub fn new(rows: Vec<(f64, f64)>, interpolate: bool) -> Result<Self> {
        let t = RateTable { rows, interpolate };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::param("rate table is empty"));
        }
        for &(r, t) in &self.rows {
            if !(r > 0.0 && r <= 1.0) || !(t > 0.0 && t <= 1.0) {
                return Err(Error::param(format!(
                    "rate table row ({r}, {t}) outside (0, 1]"
                )));
            }
            if r > t {
                return Err(Error::param(format!(
                    "code rate {r} exceeds its NGMI threshold {t}"
                )));
            }
        }
        for w in self.rows.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(Error::param(
                    "rate table must be strictly increasing in both columns",
                ));
            }
        }
        Ok(())
    }

    pub fn lowest_threshold(&self) -> f64 {
        self.rows[0].1
    }
}

/// Largest code rate whose threshold the measured NGMI meets, linearly
/// interpolated between rows when enabled.
pub fn required_code_rate(ngmi: f64, table: &RateTable) -> Result<f64> {
    table.validate()?;
    let rows = &table.rows;
    if !(ngmi >= rows[0].1) {
        return Err(Error::NoRate {
            ngmi,
            lowest: rows[0].1,
        });
    }
    let i = rows.iter().rposition(|&(_, t)| t <= ngmi).unwrap_or(0);
    if i + 1 == rows.len() || !table.interpolate {
        return Ok(rows[i].0);
    }
    let (r0, t0) = rows[i];
    let (r1, t1) = rows[i + 1];
    Ok(r0 + (r1 - r0) * (ngmi - t0) / (t1 - t0))
}

fn check_rate(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::param(format!("code rate {r} outside (0, 1]")));
    }
    Ok(())
}

/// `(H − (1 − R)·m)·B` for `m` label bits, clamped at zero.
pub fn shaped_bitrate_gbps(
    entropy_bits: f64,
    code_rate: f64,
    label_bits: usize,
    symbol_rate_gbd: f64,
) -> Result<f64> {
    check_rate(code_rate)?;
    let c = (entropy_bits - (1.0 - code_rate) * label_bits as f64) * symbol_rate_gbd;
    if c < 0.0 {
        log::warn!("parity exceeds the entropy (H = {entropy_bits}, R = {code_rate}); bitrate clamped to 0");
        return Ok(0.0);
    }
    Ok(c)
}

/// Bitrate of the shaped PAM12 format: `(H − (1 − R)·4)·B`.
pub fn net_bitrate_ps(entropy_bits: f64, code_rate: f64, symbol_rate_gbd: f64) -> Result<f64> {
    if !(0.0..=4.0).contains(&entropy_bits) {
        return Err(Error::param(format!(
            "entropy {entropy_bits} outside [0, 4] bits"
        )));
    }
    shaped_bitrate_gbps(entropy_bits, code_rate, 4, symbol_rate_gbd)
}

/// `m·R·B` for uniform PAM with `m` label bits.
pub fn uniform_bitrate_gbps(
    label_bits: usize,
    code_rate: f64,
    symbol_rate_gbd: f64,
) -> Result<f64> {
    check_rate(code_rate)?;
    Ok(label_bits as f64 * code_rate * symbol_rate_gbd)
}

/// Bitrate of uniform PAM8: `3·R·B`.
pub fn net_bitrate_uniform(code_rate: f64, symbol_rate_gbd: f64) -> Result<f64> {
    uniform_bitrate_gbps(3, code_rate, symbol_rate_gbd)
}

/// Per-run metrology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub ber: f64,
    pub bit_errors: usize,
    pub gmi_bits: f64,
    pub gmi_std_err: f64,
    pub ngmi: f64,
    /// `None` when the NGMI is below every table threshold.
    pub required_code_rate: Option<f64>,
    pub achievable_bitrate_gbps: f64,
    pub net_bitrate_gbps: f64,
    pub symbol_rate_gbd: f64,
    pub entropy_bits: f64,
    pub label_bits: usize,
    pub noise_variance: f64,
    #[serde(default)]
    pub manifest: Option<String>,
}

/// How metrics map a code rate to a bitrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitrateFormula {
    /// `(H − (1 − R)·m)·B`.
    Shaped,
    /// `m·R·B`.
    Uniform,
}

/// Options for [`evaluate_metrics`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsOptions {
    #[serde(default)]
    pub rate_table: RateTable,
    /// Divide the net bitrate by `1 + OUTER_FEC_OVERHEAD`.
    #[serde(default)]
    pub outer_fec_deduction: bool,
}

/// BER, GMI, NGMI, required code rate and bitrates of equalized symbols.
pub fn evaluate_metrics(
    soft: &[f64],
    frame: &SymbolFrame,
    symbol_rate_gbd: f64,
    formula: BitrateFormula,
    options: &MetricsOptions,
) -> Result<MetricsReport> {
    let ber = decide_and_ber(soft, frame)?;
    let sigma2 = estimate_noise_variance(soft, frame.alphabet())?;
    let llrs = llr_compute(soft, frame, Some(sigma2))?;
    let h = frame.entropy_bits();
    let m = frame.alphabet().label_bits();
    let g = gmi_ngmi(&llrs, &frame.bits(), h, m)?;
    let rate = |r: f64| match formula {
        BitrateFormula::Shaped => shaped_bitrate_gbps(h, r, m, symbol_rate_gbd),
        BitrateFormula::Uniform => uniform_bitrate_gbps(m, r, symbol_rate_gbd),
    };
    let achievable = if g.ngmi > 0.0 { rate(g.ngmi)? } else { 0.0 };
    let required = match required_code_rate(g.ngmi, &options.rate_table) {
        Ok(r) => Some(r),
        Err(Error::NoRate { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut net = match required {
        Some(r) => rate(r)?,
        None => 0.0,
    };
    if options.outer_fec_deduction {
        net /= 1.0 + OUTER_FEC_OVERHEAD;
    }
    Ok(MetricsReport {
        ber: ber.ber,
        bit_errors: ber.bit_errors,
        gmi_bits: g.gmi_bits,
        gmi_std_err: g.gmi_std_err,
        ngmi: g.ngmi,
        required_code_rate: required,
        achievable_bitrate_gbps: achievable,
        net_bitrate_gbps: net.min(achievable),
        symbol_rate_gbd,
        entropy_bits: h,
        label_bits: m,
        noise_variance: sigma2,
        manifest: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use crate::shaping::{maxwell_boltzmann, shaped_frame, uniform_frame, SymbolDistribution};
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn noisy(frame: &SymbolFrame, sigma: f64, seed: u64) -> Vec<f64> {
        let mut rng = Seed::from(seed).rng();
        frame
            .levels()
            .iter()
            .map(|x| x + sigma * Distribution::<f64>::sample(&StandardNormal, &mut rng))
            .collect()
    }

    #[test]
    fn noiseless_symbols_are_error_free() {
        let a = PamAlphabet::pam12();
        let d = maxwell_boltzmann(0.2, &a).unwrap();
        let f = shaped_frame(&a, &d, 2000, 200, Seed::from(1)).unwrap();
        let r = decide_and_ber(&f.levels(), &f).unwrap();
        assert_eq!(r.ber, 0.0);
        assert_eq!(r.decisions, f.indices());
    }

    #[test]
    fn uniform_prior_uses_midpoints() {
        let a = PamAlphabet::pam(4).unwrap();
        let lv = a.levels().to_vec();
        let mid = 0.5 * (lv[1] + lv[2]);
        let eps = 1e-12;
        let p = [0.25; 4];
        assert_eq!(
            decide_map(&[mid - eps, mid + eps], &a, &p, 10.0).unwrap(),
            vec![1, 2]
        );
        // A skewed prior moves the threshold toward the less likely level.
        let skew = [0.1, 0.4, 0.4, 0.1];
        let near_outer = 0.5 * (lv[2] + lv[3]) + 0.01;
        assert_eq!(decide_map(&[near_outer], &a, &skew, 0.1).unwrap(), vec![2]);
    }

    #[test]
    fn llr_limits() {
        let a = PamAlphabet::pam(2).unwrap();
        let d = SymbolDistribution::new(vec![0.3, 0.7]).unwrap();
        let f = SymbolFrame::new(a.clone(), d, vec![0]).unwrap();
        // y = 0 is equidistant: only the prior remains.
        let l = llr_compute(&[0.0], &f, Some(0.5)).unwrap();
        let sign = if a.label_bit(0, 0) == 0 { 1.0 } else { -1.0 };
        let expected = sign * (0.3f64 / 0.7).ln();
        assert!((l[0] - expected).abs() < 1e-12);

        let a = PamAlphabet::pam(4).unwrap();
        let f =
            SymbolFrame::new(a.clone(), SymbolDistribution::uniform(4), vec![0, 1, 2, 3]).unwrap();
        let l = llr_compute(&f.levels(), &f, Some(1e-3)).unwrap();
        for (i, chunk) in l.chunks(2).enumerate() {
            for (b, v) in chunk.iter().enumerate() {
                assert_eq!(*v > 0.0, a.label_bit(i, b) == 0);
            }
        }
    }

    #[test]
    fn pam4_llr_matches_direct_sum() {
        let a = PamAlphabet::pam(4).unwrap();
        let f = SymbolFrame::new(a.clone(), SymbolDistribution::uniform(4), vec![0]).unwrap();
        let (y, s2) = (0.3, 0.1);
        let l = llr_compute(&[y], &f, Some(s2)).unwrap();
        for b in 0..2 {
            let mut num = 0.0;
            let mut den = 0.0;
            for (i, x) in a.levels().iter().enumerate() {
                let w = 0.25 * (-(y - x) * (y - x) / (2.0 * s2)).exp();
                if a.label_bit(i, b) == 0 {
                    num += w;
                } else {
                    den += w;
                }
            }
            assert!((l[b] - (num / den).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn gmi_limits() {
        let bits = [0u8, 1, 1, 0, 0, 0, 1, 1];
        let confident: Vec<f64> = bits
            .iter()
            .map(|&b| if b == 0 { 1e6 } else { -1e6 })
            .collect();
        let g = gmi_ngmi(&confident, &bits, 3.5, 4).unwrap();
        assert!((g.gmi_bits - 3.5).abs() < 1e-12);
        assert!((g.ngmi - 1.0).abs() < 1e-12);
        let g = gmi_ngmi(&[0.0; 8], &bits, 3.5, 4).unwrap();
        assert!((g.gmi_bits - (3.5 - 4.0)).abs() < 1e-12);
        assert_eq!(g.ngmi, 0.0);
        assert!(gmi_ngmi(&[0.0; 7], &bits[..7], 3.5, 4).is_err());
    }

    #[test]
    fn bpsk_ber_follows_q_function() {
        let a = PamAlphabet::pam(2).unwrap();
        let f = uniform_frame(&a, 1_000_000, Seed::from(7)).unwrap();
        let snr_db: f64 = 6.0;
        let gamma = 10f64.powf(snr_db / 10.0);
        let y = noisy(&f, gamma.sqrt().recip(), 8);
        let r = decide_and_ber(&y, &f).unwrap();
        let x = gamma.sqrt();
        let q = tail_probability(x);
        let se = (q * (1.0 - q) / 1e6).sqrt();
        assert!((r.ber - q).abs() <= 3.0 * se, "{} vs {q}", r.ber);
    }

    /// Gaussian tail `Q(x)` by Simpson integration.
    fn tail_probability(x: f64) -> f64 {
        let (a, b, n) = (x, x + 12.0, 20_000);
        let h = (b - a) / n as f64;
        let phi = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = phi(a) + phi(b);
        for i in 1..n {
            s += phi(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn rate_lookup() {
        let t = RateTable::new(vec![(0.8, 0.85), (0.9, 0.93)], true).unwrap();
        assert!((required_code_rate(0.89, &t).unwrap() - 0.85).abs() < 1e-12);
        assert_eq!(required_code_rate(1.0, &t).unwrap(), 0.9);
        assert!(matches!(
            required_code_rate(0.5, &t),
            Err(Error::NoRate { .. })
        ));
        let step = RateTable {
            interpolate: false,
            ..t
        };
        assert_eq!(required_code_rate(0.89, &step).unwrap(), 0.8);
        assert!(RateTable::new(vec![(0.9, 0.8)], true).is_err());
        assert!(RateTable::new(vec![(0.8, 0.85), (0.7, 0.9)], true).is_err());
        RateTable::default().validate().unwrap();
    }

    #[test]
    fn bitrate_formulas() {
        assert!((net_bitrate_ps(3.5, 1.0, 216.0).unwrap() - 756.0).abs() < 1e-9);
        assert!((net_bitrate_ps(3.8, 0.9, 216.0).unwrap() - 734.4).abs() < 1e-9);
        assert_eq!(net_bitrate_uniform(1.0, 216.0).unwrap(), 648.0);
        assert_eq!(net_bitrate_ps(0.5, 0.5, 216.0).unwrap(), 0.0);
        assert!(net_bitrate_uniform(0.0, 216.0).is_err());
        assert!(net_bitrate_ps(4.5, 1.0, 216.0).is_err());
    }

    #[test]
    fn report_invariants_at_moderate_noise() {
        let a = PamAlphabet::pam12();
        let d = maxwell_boltzmann(0.1, &a).unwrap();
        let f = shaped_frame(&a, &d, 20_000, 500, Seed::from(2)).unwrap();
        let y = noisy(&f, 0.05, 3);
        let r = evaluate_metrics(
            &y,
            &f,
            216.0,
            BitrateFormula::Shaped,
            &MetricsOptions::default(),
        )
        .unwrap();
        assert!(r.ngmi > 0.0 && r.ngmi < 1.0);
        assert!(r.gmi_bits <= r.entropy_bits);
        assert!(r.net_bitrate_gbps <= r.achievable_bitrate_gbps);
        let with_outer = MetricsOptions {
            outer_fec_deduction: true,
            ..MetricsOptions::default()
        };
        let r2 = evaluate_metrics(&y, &f, 216.0, BitrateFormula::Shaped, &with_outer).unwrap();
        assert!((r2.net_bitrate_gbps * 1.0079 - r.net_bitrate_gbps).abs() < 1e-9);
    }

    #[test]
    fn ber_falls_with_snr() {
        let a = PamAlphabet::pam(4).unwrap();
        let f = uniform_frame(&a, 50_000, Seed::from(4)).unwrap();
        let mut last = f64::INFINITY;
        for sigma in [0.5, 0.35, 0.25, 0.18, 0.12] {
            let b = decide_and_ber(&noisy(&f, sigma, 5), &f).unwrap().ber;
            assert!(b <= last);
            last = b;
        }
    }

    proptest! {
        #[test]
        fn ngmi_is_scale_invariant(scale in 0.1f64..10.0, seed in 0u64..1000) {
            let a = PamAlphabet::pam(4).unwrap();
            let f = uniform_frame(&a, 500, Seed::from(seed)).unwrap();
            let y = noisy(&f, 0.3, seed + 1);
            let base = gmi_ngmi(&llr_compute(&y, &f, Some(0.09)).unwrap(), &f.bits(), 2.0, 2).unwrap();
            let sa = a.scaled(scale).unwrap();
            let sf = SymbolFrame::new(sa, f.distribution().clone(), f.indices().to_vec()).unwrap();
            let ys: Vec<f64> = y.iter().map(|v| v * scale).collect();
            let s = gmi_ngmi(&llr_compute(&ys, &sf, Some(0.09 * scale * scale)).unwrap(), &f.bits(), 2.0, 2).unwrap();
            prop_assert!((base.ngmi - s.ngmi).abs() <= 1e-9);
        }

        #[test]
        fn ngmi_is_bounded(llrs in proptest::collection::vec(-1e3f64..1e3, 12), bits in proptest::collection::vec(0u8..2, 12)) {
            let g = gmi_ngmi(&llrs, &bits, 2.5, 3).unwrap();
            prop_assert!((0.0..=1.0).contains(&g.ngmi));
            prop_assert!(g.gmi_bits <= 2.5 + 1e-12);
        }

        #[test]
        fn ps_bitrate_is_monotone(h in 2.0f64..3.58, dh in 0.0f64..0.5, r in 0.5f64..0.99, dr in 0.0f64..0.01) {
            let h2 = (h + dh).min(12f64.log2());
            let base = net_bitrate_ps(h, r, 216.0).unwrap();
            prop_assert!(net_bitrate_ps(h2, r, 216.0).unwrap() >= base);
            prop_assert!(net_bitrate_ps(h, r + dr, 216.0).unwrap() >= base);
        }

        #[test]
        fn net_never_exceeds_ngmi(ngmi in 0.62f64..1.0) {
            let r = required_code_rate(ngmi, &RateTable::default()).unwrap();
            prop_assert!(r <= ngmi);
        }
    }
}
