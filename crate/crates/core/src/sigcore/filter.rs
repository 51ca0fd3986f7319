//! Filter specifications and whole-record frequency-domain filtering.
//!
//! Digital filters are linear-phase windowed-sinc FIRs whose group delay is
//! removed, so they act as zero-phase responses on the record. Analog filters
//! (Bessel, Butterworth) keep their nonlinear phase; only the bulk group
//! delay at DC is removed.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectrum::{self, bin_frequency};
use super::SampledWaveform;
use crate::error::{Error, Result};

/// Default transition width of windowed-sinc digital filters.
pub const DEFAULT_TRANSITION_HZ: f64 = 2e9;

/// Stopband attenuation targeted by the Kaiser window design.
const KAISER_ATTENUATION_DB: f64 = 80.0;

/// Response family of a lowpass/highpass/bandpass filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FilterShape {
    /// Brick-wall response (1 in the passband, 0 outside, 1/2 at the edge).
    Ideal,
    /// Kaiser-windowed sinc FIR, zero-phase after group-delay removal.
    Windowed { transition_hz: f64 },
    /// Analog Bessel response with the 3-dB point at the cutoff.
    Bessel { order: usize },
    /// Analog Butterworth response with the 3-dB point at the cutoff.
    Butterworth { order: usize },
}

impl Default for FilterShape {
    fn default() -> Self {
        FilterShape::Windowed {
            transition_hz: DEFAULT_TRANSITION_HZ,
        }
    }
}

/// Frequency-response table with linear interpolation of magnitude and
/// unwrapped phase.
///
/// A table whose lowest frequency is non-negative is one-sided: it is
/// evaluated at `|f|` and conjugated for `f < 0`. Outside the tabulated range
/// the nearest edge value applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseTable {
    freqs_hz: Vec<f64>,
    /// `[re, im]` pairs aligned with `freqs_hz`.
    values: Vec<[f64; 2]>,
    #[serde(skip)]
    polar: Vec<(f64, f64)>,
}

impl ResponseTable {
    pub fn new(freqs_hz: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if freqs_hz.is_empty() || freqs_hz.len() != values.len() {
            return Err(Error::param(format!(
                "response table needs matching non-empty columns ({} freqs, {} values)",
                freqs_hz.len(),
                values.len()
            )));
        }
        if freqs_hz.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param(
                "response table frequencies must be strictly increasing",
            ));
        }
        let mut table = ResponseTable {
            freqs_hz,
            values: values.iter().map(|v| [v.re, v.im]).collect(),
            polar: Vec::new(),
        };
        table.build_polar();
        Ok(table)
    }

    /// Tabulates `response` at the given frequencies.
    pub fn sample<F: Fn(f64) -> Complex64>(freqs_hz: Vec<f64>, response: F) -> Result<Self> {
        let values = freqs_hz.iter().map(|&f| response(f)).collect();
        Self::new(freqs_hz, values)
    }

    /// Flat unit response.
    pub fn unity() -> Self {
        Self::new(vec![0.0], vec![Complex64::new(1.0, 0.0)]).expect("valid table")
    }

    fn build_polar(&mut self) {
        let mut out = Vec::with_capacity(self.values.len());
        let mut prev_phase: Option<f64> = None;
        for v in &self.values {
            let c = Complex64::new(v[0], v[1]);
            let mut phase = c.arg();
            if let Some(p) = prev_phase {
                while phase - p > PI {
                    phase -= 2.0 * PI;
                }
                while phase - p < -PI {
                    phase += 2.0 * PI;
                }
            }
            prev_phase = Some(phase);
            out.push((c.norm(), phase));
        }
        self.polar = out;
    }

    pub fn freqs_hz(&self) -> &[f64] {
        &self.freqs_hz
    }

    pub fn is_one_sided(&self) -> bool {
        self.freqs_hz[0] >= 0.0
    }

    pub fn evaluate(&self, f: f64) -> Complex64 {
        if self.polar.len() != self.values.len() {
            // Deserialized tables arrive without the cache.
            let mut t = self.clone();
            t.build_polar();
            return t.evaluate(f);
        }
        if self.is_one_sided() && f < 0.0 {
            return self.evaluate(-f).conj();
        }
        let fs = &self.freqs_hz;
        let last = fs.len() - 1;
        let (mag, phase) = if f <= fs[0] {
            self.polar[0]
        } else if f >= fs[last] {
            self.polar[last]
        } else {
            let i = fs.partition_point(|&x| x <= f) - 1;
            let t = (f - fs[i]) / (fs[i + 1] - fs[i]);
            let (m0, p0) = self.polar[i];
            let (m1, p1) = self.polar[i + 1];
            (m0 + t * (m1 - m0), p0 + t * (p1 - p0))
        };
        Complex64::from_polar(mag, phase)
    }
}

/// Filter to be applied to a waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterSpec {
    /// Explicit FIR taps; the center tap `(len - 1) / 2` is time zero.
    FirTaps {
        taps: Vec<f64>,
    },
    Lowpass {
        cutoff_hz: f64,
        #[serde(default)]
        shape: FilterShape,
    },
    Highpass {
        cutoff_hz: f64,
        #[serde(default)]
        shape: FilterShape,
    },
    Bandpass {
        low_hz: f64,
        high_hz: f64,
        #[serde(default)]
        shape: FilterShape,
    },
    /// Zero-phase super-Gaussian, `|H(f)|^2 = 2^-(f/B)^(2 order)`.
    GaussianLike {
        bandwidth_hz: f64,
        order: usize,
    },
    Programmable {
        table: ResponseTable,
    },
}

impl FilterSpec {
    pub fn lowpass(cutoff_hz: f64, shape: FilterShape) -> Self {
        FilterSpec::Lowpass { cutoff_hz, shape }
    }

    pub fn highpass(cutoff_hz: f64, shape: FilterShape) -> Self {
        FilterSpec::Highpass { cutoff_hz, shape }
    }

    /// Checks the spec against a sample rate.
    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        let nyquist = sample_rate_hz / 2.0;
        let check_cut = |name: &str, f: f64| {
            if !(f > 0.0 && f < nyquist) {
                Err(Error::param(format!(
                    "{name} {f:.4e} Hz must lie in (0, {nyquist:.4e}) Hz"
                )))
            } else {
                Ok(())
            }
        };
        let check_shape = |shape: &FilterShape| match *shape {
            FilterShape::Windowed { transition_hz } if !(transition_hz > 0.0) => {
                Err(Error::param("transition width must be positive"))
            }
            FilterShape::Bessel { order } | FilterShape::Butterworth { order }
                if !(1..=12).contains(&order) =>
            {
                Err(Error::param(format!(
                    "analog filter order {order} outside 1..=12"
                )))
            }
            _ => Ok(()),
        };
        match self {
            FilterSpec::FirTaps { taps } => {
                if taps.is_empty() {
                    return Err(Error::param("FIR filter needs at least one tap"));
                }
                Ok(())
            }
            FilterSpec::Lowpass { cutoff_hz, shape }
            | FilterSpec::Highpass { cutoff_hz, shape } => {
                check_cut("cutoff", *cutoff_hz)?;
                check_shape(shape)
            }
            FilterSpec::Bandpass {
                low_hz,
                high_hz,
                shape,
            } => {
                check_cut("lower band edge", *low_hz)?;
                check_cut("upper band edge", *high_hz)?;
                if low_hz >= high_hz {
                    return Err(Error::param("bandpass edges must satisfy low < high"));
                }
                check_shape(shape)
            }
            FilterSpec::GaussianLike {
                bandwidth_hz,
                order,
            } => {
                if !(*bandwidth_hz > 0.0) || *order == 0 {
                    return Err(Error::param(
                        "Gaussian filter needs positive bandwidth and order",
                    ));
                }
                Ok(())
            }
            FilterSpec::Programmable { .. } => Ok(()),
        }
    }

    /// Response on the `n`-point DFT grid at `sample_rate_hz`, in FFT bin
    /// order.
    pub fn response_grid(&self, n: usize, sample_rate_hz: f64) -> Result<Vec<Complex64>> {
        self.validate(sample_rate_hz)?;
        let fir = |taps: &[f64]| fir_grid(taps, n);
        Ok(match self {
            FilterSpec::FirTaps { taps } => fir(taps),
            FilterSpec::Lowpass {
                cutoff_hz,
                shape: FilterShape::Windowed { transition_hz },
            } => fir(&windowed_lowpass_taps(
                *cutoff_hz,
                *transition_hz,
                sample_rate_hz,
                n,
            )),
            FilterSpec::Highpass {
                cutoff_hz,
                shape: FilterShape::Windowed { transition_hz },
            } => fir(&windowed_lowpass_taps(
                *cutoff_hz,
                *transition_hz,
                sample_rate_hz,
                n,
            ))
            .into_iter()
            .map(|h| Complex64::new(1.0, 0.0) - h)
            .collect(),
            FilterSpec::Bandpass {
                low_hz,
                high_hz,
                shape: FilterShape::Windowed { transition_hz },
            } => {
                let hi = fir(&windowed_lowpass_taps(
                    *high_hz,
                    *transition_hz,
                    sample_rate_hz,
                    n,
                ));
                let lo = fir(&windowed_lowpass_taps(
                    *low_hz,
                    *transition_hz,
                    sample_rate_hz,
                    n,
                ));
                hi.iter().zip(&lo).map(|(a, b)| a - b).collect()
            }
            _ => (0..n)
                .map(|k| self.analytic_response(bin_frequency(k, n, sample_rate_hz)))
                .collect(),
        })
    }

    /// Response at a single frequency. Windowed FIRs are evaluated through
    /// their DTFT at `sample_rate_hz`.
    pub fn response_at(&self, f: f64, sample_rate_hz: f64) -> Complex64 {
        match self {
            FilterSpec::FirTaps { taps } => fir_dtft(taps, f, sample_rate_hz),
            FilterSpec::Lowpass {
                cutoff_hz,
                shape: FilterShape::Windowed { transition_hz },
            } => fir_dtft(
                &windowed_lowpass_taps(*cutoff_hz, *transition_hz, sample_rate_hz, usize::MAX),
                f,
                sample_rate_hz,
            ),
            FilterSpec::Highpass {
                cutoff_hz,
                shape: FilterShape::Windowed { transition_hz },
            } => {
                Complex64::new(1.0, 0.0)
                    - fir_dtft(
                        &windowed_lowpass_taps(
                            *cutoff_hz,
                            *transition_hz,
                            sample_rate_hz,
                            usize::MAX,
                        ),
                        f,
                        sample_rate_hz,
                    )
            }
            FilterSpec::Bandpass {
                low_hz,
                high_hz,
                shape: FilterShape::Windowed { transition_hz },
            } => {
                let taps = |c| windowed_lowpass_taps(c, *transition_hz, sample_rate_hz, usize::MAX);
                fir_dtft(&taps(*high_hz), f, sample_rate_hz)
                    - fir_dtft(&taps(*low_hz), f, sample_rate_hz)
            }
            _ => self.analytic_response(f),
        }
    }

    fn analytic_response(&self, f: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            FilterSpec::Lowpass { cutoff_hz, shape } => lowpass_response(*shape, f, *cutoff_hz),
            FilterSpec::Highpass { cutoff_hz, shape } => highpass_response(*shape, f, *cutoff_hz),
            FilterSpec::Bandpass {
                low_hz,
                high_hz,
                shape,
            } => lowpass_response(*shape, f, *high_hz) * highpass_response(*shape, f, *low_hz),
            FilterSpec::GaussianLike {
                bandwidth_hz,
                order,
            } => {
                let x = (f / bandwidth_hz).abs().powi(2 * *order as i32);
                one * (-0.5 * std::f64::consts::LN_2 * x).exp()
            }
            FilterSpec::Programmable { table } => table.evaluate(f),
            FilterSpec::FirTaps { .. } => unreachable!("FIR responses are evaluated via DTFT"),
        }
    }
}

/// Applies `spec` to `wave` on the full record. Output has the input's length
/// and sample rate; linear-phase FIRs introduce no net delay.
pub fn apply_filter(wave: &SampledWaveform, spec: &FilterSpec) -> Result<SampledWaveform> {
    let grid = spec.response_grid(wave.len(), wave.sample_rate_hz())?;
    Ok(spectrum::apply_grid(wave, &grid))
}

fn lowpass_response(shape: FilterShape, f: f64, cutoff: f64) -> Complex64 {
    let x = f.abs() / cutoff;
    match shape {
        FilterShape::Ideal => Complex64::new(ideal_edge(1.0 - x), 0.0),
        FilterShape::Bessel { order } => analog_lowpass(AnalogFamily::Bessel, order, f / cutoff),
        FilterShape::Butterworth { order } => {
            analog_lowpass(AnalogFamily::Butterworth, order, f / cutoff)
        }
        FilterShape::Windowed { .. } => unreachable!("windowed filters use FIR evaluation"),
    }
}

fn highpass_response(shape: FilterShape, f: f64, cutoff: f64) -> Complex64 {
    match shape {
        FilterShape::Ideal => Complex64::new(ideal_edge(f.abs() / cutoff - 1.0), 0.0),
        FilterShape::Bessel { order } => analog_highpass(AnalogFamily::Bessel, order, f / cutoff),
        FilterShape::Butterworth { order } => {
            analog_highpass(AnalogFamily::Butterworth, order, f / cutoff)
        }
        FilterShape::Windowed { .. } => unreachable!("windowed filters use FIR evaluation"),
    }
}

fn ideal_edge(margin: f64) -> f64 {
    if margin > 1e-12 {
        1.0
    } else if margin < -1e-12 {
        0.0
    } else {
        0.5
    }
}

#[derive(Clone, Copy)]
enum AnalogFamily {
    Bessel,
    Butterworth,
}

/// Denominator polynomial coefficients (ascending powers), normalized so the
/// 3-dB frequency is at `s = j`.
fn analog_denominator(family: AnalogFamily, order: usize) -> Vec<Complex64> {
    let raw: Vec<Complex64> = match family {
        AnalogFamily::Bessel => {
            // Reverse Bessel polynomial: a_k = (2n-k)! / (2^(n-k) k! (n-k)!).
            let n = order;
            (0..=n)
                .map(|k| {
                    let mut a = 1.0f64;
                    for i in (n - k + 1)..=(2 * n - k) {
                        a *= i as f64;
                    }
                    for i in 1..=k {
                        a /= i as f64;
                    }
                    a /= 2f64.powi((n - k) as i32);
                    Complex64::new(a, 0.0)
                })
                .collect()
        }
        AnalogFamily::Butterworth => {
            // Expand prod (s - p_k) over the left-half-plane poles.
            let n = order;
            let mut poly = vec![Complex64::new(1.0, 0.0)];
            for k in 1..=n {
                let theta = PI * (2 * k + n - 1) as f64 / (2 * n) as f64;
                let p = Complex64::from_polar(1.0, theta);
                let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
                for (i, c) in poly.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= c * p;
                }
                poly = next;
            }
            poly
        }
    };
    let w3 = match family {
        AnalogFamily::Butterworth => 1.0,
        AnalogFamily::Bessel => three_db_frequency(&raw),
    };
    // Rescale s -> s * w3 so |H(j)| = 1/sqrt(2).
    raw.iter()
        .enumerate()
        .map(|(k, c)| c * w3.powi(k as i32))
        .collect()
}

fn eval_poly(coeffs: &[Complex64], s: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c)
}

fn three_db_frequency(coeffs: &[Complex64]) -> f64 {
    let mag2 = |w: f64| (coeffs[0] / eval_poly(coeffs, Complex64::new(0.0, w))).norm_sqr();
    let (mut lo, mut hi) = (0.0, 1.0);
    while mag2(hi) > 0.5 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mag2(mid) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Group delay at DC of `H(s) = a0 / D(s)` in normalized time units.
fn dc_group_delay(coeffs: &[Complex64]) -> f64 {
    // tau(0) = a1 / a0 for a real-coefficient all-pole response.
    coeffs[1].re / coeffs[0].re
}

fn analog_lowpass(family: AnalogFamily, order: usize, x: f64) -> Complex64 {
    let d = analog_denominator(family, order);
    let s = Complex64::new(0.0, x);
    let h = d[0] / eval_poly(&d, s);
    h * Complex64::from_polar(1.0, dc_group_delay(&d) * x)
}

fn analog_highpass(family: AnalogFamily, order: usize, x: f64) -> Complex64 {
    if x == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let d = analog_denominator(family, order);
    // Lowpass-to-highpass transform s -> 1/s.
    let s = Complex64::new(0.0, x).inv();
    d[0] / eval_poly(&d, s)
}

/// Kaiser-windowed sinc lowpass taps (odd length, unit DC gain), at most
/// `max_len` long.
pub fn windowed_lowpass_taps(
    cutoff_hz: f64,
    transition_hz: f64,
    fs: f64,
    max_len: usize,
) -> Vec<f64> {
    let a = KAISER_ATTENUATION_DB;
    let beta = 0.1102 * (a - 8.7);
    let dw = 2.0 * PI * transition_hz / fs;
    let mut len = ((a - 8.0) / (2.285 * dw)).ceil() as usize + 1;
    if len.is_multiple_of(2) {
        len += 1;
    }
    let cap = if max_len.is_multiple_of(2) {
        max_len.saturating_sub(1)
    } else {
        max_len
    };
    let len = len.min(cap.max(1));
    let c = (len / 2) as f64;
    let fc = cutoff_hz / fs;
    let i0b = bessel_i0(beta);
    let mut taps: Vec<f64> = (0..len)
        .map(|i| {
            let k = i as f64 - c;
            let sinc = if k == 0.0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * k).sin() / (PI * k)
            };
            let r = if c > 0.0 { k / c } else { 0.0 };
            let w = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / i0b;
            sinc * w
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let y = x * x / 4.0;
    for k in 1..200 {
        term *= y / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Zero-phase grid response of centered FIR taps (the center tap is time
/// zero), on an `n`-point DFT grid.
fn fir_grid(taps: &[f64], n: usize) -> Vec<Complex64> {
    let c = (taps.len() - 1) / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, &t) in taps.iter().enumerate() {
        let idx = (i as isize - c as isize).rem_euclid(n as isize) as usize;
        buf[idx] += t;
    }
    spectrum::fft(&buf)
}

fn fir_dtft(taps: &[f64], f: f64, fs: f64) -> Complex64 {
    let c = ((taps.len() - 1) / 2) as f64;
    taps.iter()
        .enumerate()
        .map(|(i, &t)| t * Complex64::from_polar(1.0, -2.0 * PI * f * (i as f64 - c) / fs))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigcore::{nmse_db, Domain};

    fn tone(n: usize, fs: f64, f: f64) -> SampledWaveform {
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * f * i as f64 / fs).cos())
            .collect();
        SampledWaveform::from_real(fs, &x, Domain::Electrical).unwrap()
    }

    fn db(x: f64) -> f64 {
        20.0 * x.log10()
    }

    #[test]
    fn all_pass_table_is_identity() {
        let w = tone(512, 512e9, 10e9);
        let out = apply_filter(
            &w,
            &FilterSpec::Programmable {
                table: ResponseTable::unity(),
            },
        )
        .unwrap();
        assert!(nmse_db(&w, &out).unwrap() <= -90.0);
    }

    #[test]
    fn windowed_lowpass_passes_and_rejects_tones() {
        let fs = 512e9;
        let n = 4096;
        let lp = FilterSpec::lowpass(80e9, FilterShape::default());
        // Oracle: the filter's own frequency response at the tone frequency.
        let pass = apply_filter(&tone(n, fs, 10e9), &lp).unwrap();
        let a = crate::sigcore::spectrum::tone(&pass, 10e9).norm();
        let expected = lp.response_at(10e9, fs).norm();
        assert!((db(a) - db(expected)).abs() < 0.01);
        assert!(db(a).abs() < 0.1);
        let stop = apply_filter(&tone(n, fs, 100e9), &lp).unwrap();
        let a = crate::sigcore::spectrum::tone(&stop, 100e9).norm();
        assert!(db(a) <= -40.0, "stopband {} dB", db(a));
        assert!(db(lp.response_at(100e9, fs).norm()) <= -40.0);
    }

    #[test]
    fn cutoff_at_or_above_nyquist_is_rejected() {
        let w = tone(64, 100.0, 5.0);
        assert!(apply_filter(&w, &FilterSpec::lowpass(50.0, FilterShape::Ideal)).is_err());
        assert!(apply_filter(&w, &FilterSpec::highpass(0.0, FilterShape::Ideal)).is_err());
    }

    #[test]
    fn complementary_windowed_pair_sums_to_unity() {
        let n = 2048;
        let fs = 512e9;
        let lp = FilterSpec::lowpass(76e9, FilterShape::default())
            .response_grid(n, fs)
            .unwrap();
        let hp = FilterSpec::highpass(76e9, FilterShape::default())
            .response_grid(n, fs)
            .unwrap();
        for (a, b) in lp.iter().zip(&hp) {
            assert!((a + b - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn analog_filters_hit_three_db_at_cutoff() {
        for shape in [
            FilterShape::Bessel { order: 4 },
            FilterShape::Butterworth { order: 2 },
        ] {
            let lp = FilterSpec::lowpass(100e9, shape);
            let hp = FilterSpec::highpass(100e9, shape);
            assert!((db(lp.response_at(100e9, 512e9).norm()) + 3.0103).abs() < 1e-6);
            assert!((db(hp.response_at(100e9, 512e9).norm()) + 3.0103).abs() < 1e-6);
            assert!((lp.response_at(0.0, 512e9).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bessel_has_near_linear_phase_after_delay_removal() {
        let lp = FilterSpec::lowpass(100e9, FilterShape::Bessel { order: 4 });
        // Residual phase in the passband is small once the DC delay is removed.
        let phase = lp.response_at(30e9, 512e9).arg();
        assert!(phase.abs() < 0.01, "residual phase {phase}");
    }

    #[test]
    fn table_interpolates_and_extends_hermitian() {
        let t = ResponseTable::new(
            vec![0.0, 10.0],
            vec![Complex64::new(1.0, 0.0), Complex64::from_polar(3.0, 1.0)],
        )
        .unwrap();
        let mid = t.evaluate(5.0);
        assert!((mid.norm() - 2.0).abs() < 1e-12);
        assert!((mid.arg() - 0.5).abs() < 1e-12);
        assert!((t.evaluate(-5.0) - mid.conj()).norm() < 1e-12);
        assert!((t.evaluate(20.0) - Complex64::from_polar(3.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn gaussian_like_is_three_db_at_bandwidth() {
        let g = FilterSpec::GaussianLike {
            bandwidth_hz: 50e9,
            order: 3,
        };
        assert!((db(g.response_at(50e9, 512e9).norm()) + 3.0103).abs() < 1e-3);
    }
}
