//! Third-order Volterra pre-distortion.
//!
//! Tap index `i` of a kernel with memory `L` acts on lag `i − (L−1)/2`, so the
//! kernel is centered: the identity kernel is a unit tap at the middle of
//! `h1`. Nonlinear taps are stored once per index combination `i ≤ j (≤ k)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigcore::nmse_db_slices;

/// Largest normal-equation condition number accepted by [`fit_volterra`].
pub const MAX_CONDITION_NUMBER: f64 = 1e12;

/// Which nonlinear index combinations a kernel carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pruning {
    Off,
    /// Only `i = j (= k)`.
    Diagonal,
    /// Index spread `max − min ≤ 1`.
    DiagonalNeighbor,
    Full,
}

impl Pruning {
    fn keeps(self, min: usize, max: usize) -> bool {
        match self {
            Pruning::Off => false,
            Pruning::Diagonal => min == max,
            Pruning::DiagonalNeighbor => max - min <= 1,
            Pruning::Full => true,
        }
    }
}

/// Memory lengths and pruning of a Volterra kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolterraStructure {
    /// First-order memory in symbols (odd).
    pub memory: usize,
    /// Memory spanned by second- and third-order terms (odd, ≤ `memory`).
    pub nonlinear_memory: usize,
    pub second_order: Pruning,
    pub third_order: Pruning,
}

impl Default for VolterraStructure {
    fn default() -> Self {
        VolterraStructure {
            memory: 31,
            nonlinear_memory: 7,
            second_order: Pruning::DiagonalNeighbor,
            third_order: Pruning::DiagonalNeighbor,
        }
    }
}

impl VolterraStructure {
    pub fn linear(memory: usize) -> Self {
        VolterraStructure {
            memory,
            nonlinear_memory: 1,
            second_order: Pruning::Off,
            third_order: Pruning::Off,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.memory.is_multiple_of(2) || self.nonlinear_memory.is_multiple_of(2) {
            return Err(Error::param("Volterra memories must be odd"));
        }
        if self.nonlinear_memory > self.memory {
            return Err(Error::param(
                "nonlinear memory cannot exceed the linear memory",
            ));
        }
        Ok(())
    }

    fn nonlinear_range(&self) -> std::ops::RangeInclusive<usize> {
        let c = self.memory / 2;
        let h = self.nonlinear_memory / 2;
        (c - h)..=(c + h)
    }

    /// Second-order index pairs kept by the pruning.
    pub fn second_order_terms(&self) -> Vec<[usize; 2]> {
        let r = self.nonlinear_range();
        let mut out = Vec::new();
        for i in r.clone() {
            for j in i..=*r.end() {
                if self.second_order.keeps(i, j) {
                    out.push([i, j]);
                }
            }
        }
        out
    }

    /// Third-order index triples kept by the pruning.
    pub fn third_order_terms(&self) -> Vec<[usize; 3]> {
        let r = self.nonlinear_range();
        let mut out = Vec::new();
        for i in r.clone() {
            for j in i..=*r.end() {
                for k in j..=*r.end() {
                    if self.third_order.keeps(i, k) {
                        out.push([i, j, k]);
                    }
                }
            }
        }
        out
    }

    pub fn coefficient_count(&self) -> usize {
        self.memory + self.second_order_terms().len() + self.third_order_terms().len()
    }
}

/// Volterra kernel with symmetric-index storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolterraKernel {
    pub h1: Vec<f64>,
    pub h2: Vec<([usize; 2], f64)>,
    pub h3: Vec<([usize; 3], f64)>,
}

impl VolterraKernel {
    /// Unit impulse at the center of an odd-length first-order memory.
    pub fn identity(memory: usize) -> Result<Self> {
        if memory.is_multiple_of(2) {
            return Err(Error::param("Volterra memory must be odd"));
        }
        let mut h1 = vec![0.0; memory];
        h1[memory / 2] = 1.0;
        Ok(VolterraKernel {
            h1,
            h2: Vec::new(),
            h3: Vec::new(),
        })
    }

    pub fn memory(&self) -> usize {
        self.h1.len()
    }

    fn validate(&self) -> Result<()> {
        let l = self.h1.len();
        if l.is_multiple_of(2) {
            return Err(Error::param("Volterra memory must be odd"));
        }
        let ok2 = self.h2.iter().all(|([i, j], _)| i <= j && *j < l);
        let ok3 = self
            .h3
            .iter()
            .all(|([i, j, k], _)| i <= j && j <= k && *k < l);
        if !(ok2 && ok3) {
            return Err(Error::param(
                "nonlinear taps must satisfy i <= j <= k < memory",
            ));
        }
        Ok(())
    }
}

/// Sample `x[n − lag]` with zero padding outside the record.
#[inline]
fn at(x: &[f64], n: usize, idx: usize, center: usize) -> f64 {
    // lag = idx − center, so the sample index is n + center − idx.
    let pos = n + center;
    if pos < idx {
        return 0.0;
    }
    x.get(pos - idx).copied().unwrap_or(0.0)
}

/// Applies the kernel to a real sequence; output length equals input length.
pub fn apply_volterra(symbols: &[f64], kernel: &VolterraKernel) -> Result<Vec<f64>> {
    kernel.validate()?;
    let c = kernel.memory() / 2;
    Ok((0..symbols.len())
        .map(|n| {
            let mut y = 0.0;
            for (i, &h) in kernel.h1.iter().enumerate() {
                if h != 0.0 {
                    y += h * at(symbols, n, i, c);
                }
            }
            for &([i, j], h) in &kernel.h2 {
                y += h * at(symbols, n, i, c) * at(symbols, n, j, c);
            }
            for &([i, j, k], h) in &kernel.h3 {
                y += h * at(symbols, n, i, c) * at(symbols, n, j, c) * at(symbols, n, k, c);
            }
            y
        })
        .collect())
}

/// Diagnostics of a least-squares kernel fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    /// NMSE of the fitted post-inverse output against the stimulus on the
    /// training data.
    pub training_nmse_db: f64,
    pub condition_number: f64,
    pub coefficients: usize,
}

/// Fits the post-inverse kernel mapping `observed_response` back to
/// `stimulus` by least squares (indirect learning). The result is meant to be
/// used as a pre-distorter in front of the system that produced the
/// response.
pub fn fit_volterra(
    stimulus: &[f64],
    observed_response: &[f64],
    structure: &VolterraStructure,
) -> Result<(VolterraKernel, FitReport)> {
    structure.validate()?;
    if stimulus.len() != observed_response.len() {
        return Err(Error::param("stimulus and response lengths differ"));
    }
    let t2 = structure.second_order_terms();
    let t3 = structure.third_order_terms();
    let p = structure.memory + t2.len() + t3.len();
    if stimulus.len() < 10 * p {
        return Err(Error::param(format!(
            "{} samples are too few to fit {p} coefficients (need >= {})",
            stimulus.len(),
            10 * p
        )));
    }
    let c = structure.memory / 2;
    let x = observed_response;
    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    let mut row = vec![0.0; p];
    for (n, &target) in stimulus.iter().enumerate() {
        regressor_row(x, n, c, structure.memory, &t2, &t3, &mut row);
        for a in 0..p {
            let ra = row[a];
            if ra == 0.0 {
                continue;
            }
            rhs[a] += ra * target;
            for b in a..p {
                gram[(a, b)] += ra * row[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    let eig = gram.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let min_ev = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    let condition_number = if min_ev > 0.0 {
        max_ev / min_ev
    } else {
        f64::INFINITY
    };
    if !(condition_number <= MAX_CONDITION_NUMBER) {
        return Err(Error::Numerical(format!(
            "Volterra normal equations are ill-conditioned (condition number {condition_number:.3e}, \
             eigenvalues in [{min_ev:.3e}, {max_ev:.3e}]); the response may lack excitation"
        )));
    }
    let coeffs = gram
        .cholesky()
        .ok_or_else(|| Error::Numerical("Volterra normal matrix is not positive definite".into()))?
        .solve(&rhs);
    let kernel = VolterraKernel {
        h1: coeffs.as_slice()[..structure.memory].to_vec(),
        h2: t2
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, coeffs[structure.memory + i]))
            .collect(),
        h3: t3
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, coeffs[structure.memory + t2.len() + i]))
            .collect(),
    };
    let training_nmse_db = held_out_nmse_db(&kernel, stimulus, observed_response)?;
    Ok((
        kernel,
        FitReport {
            training_nmse_db,
            condition_number,
            coefficients: p,
        },
    ))
}

fn regressor_row(
    x: &[f64],
    n: usize,
    c: usize,
    memory: usize,
    t2: &[[usize; 2]],
    t3: &[[usize; 3]],
    row: &mut [f64],
) {
    for (i, r) in row.iter_mut().enumerate().take(memory) {
        *r = at(x, n, i, c);
    }
    for (slot, &[i, j]) in row[memory..].iter_mut().zip(t2) {
        *slot = at(x, n, i, c) * at(x, n, j, c);
    }
    for (slot, &[i, j, k]) in row[memory + t2.len()..].iter_mut().zip(t3) {
        *slot = at(x, n, i, c) * at(x, n, j, c) * at(x, n, k, c);
    }
}

/// NMSE of `kernel(response)` against `stimulus`, i.e. how well the kernel
/// inverts the system on a (possibly held-out) stimulus/response pair.
pub fn held_out_nmse_db(
    kernel: &VolterraKernel,
    stimulus: &[f64],
    response: &[f64],
) -> Result<f64> {
    let inverted = apply_volterra(response, kernel)?;
    nmse_db_slices(stimulus, &inverted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use rand::Rng;

    fn random_signal(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = Seed::from(seed).rng();
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn fir(x: &[f64], h: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|n| {
                h.iter()
                    .enumerate()
                    .filter(|(k, _)| *k <= n)
                    .map(|(k, c)| c * x[n - k])
                    .sum()
            })
            .collect()
    }

    #[test]
    fn identity_kernel_reproduces_input() {
        let x = random_signal(100, 1);
        let y = apply_volterra(&x, &VolterraKernel::identity(31).unwrap()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn memoryless_cubic_tap() {
        let x = random_signal(50, 2);
        let mut k = VolterraKernel::identity(5).unwrap();
        k.h3.push(([2, 2, 2], 0.3));
        let y = apply_volterra(&x, &k).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((b - (a + 0.3 * a * a * a)).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_kernel_equals_fir_convolution() {
        let x = random_signal(80, 3);
        let mut k = VolterraKernel::identity(5).unwrap();
        k.h1 = vec![0.0, 0.0, 1.0, 0.4, -0.2];
        // Index 3 is lag +1, index 4 lag +2: y[n] = x[n] + 0.4 x[n-1] - 0.2 x[n-2].
        let y = apply_volterra(&x, &k).unwrap();
        let expected = fir(&x, &[1.0, 0.4, -0.2]);
        for (a, b) in y.iter().zip(&expected) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn fit_on_identity_channel_returns_identity() {
        let x = random_signal(4000, 4);
        let structure = VolterraStructure {
            memory: 7,
            nonlinear_memory: 3,
            second_order: Pruning::Diagonal,
            third_order: Pruning::Diagonal,
        };
        let (k, report) = fit_volterra(&x, &x, &structure).unwrap();
        for (i, h) in k.h1.iter().enumerate() {
            let expect = if i == 3 { 1.0 } else { 0.0 };
            assert!((h - expect).abs() < 1e-6);
        }
        assert!(k.h2.iter().all(|(_, h)| h.abs() < 1e-6));
        assert!(k.h3.iter().all(|(_, h)| h.abs() < 1e-6));
        assert!(report.training_nmse_db < -100.0);
    }

    #[test]
    fn fit_inverts_linear_fir() {
        // Oracle: the inverse of a minimum-phase FIR by frequency-domain
        // division, truncated to the kernel memory.
        let h = [1.0, 0.5, 0.2];
        let train_x = random_signal(20_000, 5);
        let test_x = random_signal(20_000, 6);
        let structure = VolterraStructure::linear(31);
        let (k, _) = fit_volterra(&train_x, &fir(&train_x, &h), &structure).unwrap();
        let nmse = held_out_nmse_db(&k, &test_x, &fir(&test_x, &h)).unwrap();
        assert!(nmse <= -30.0, "held-out {nmse} dB");

        let n = 1024;
        let mut hx = vec![num_complex::Complex64::new(0.0, 0.0); n];
        for (i, c) in h.iter().enumerate() {
            hx[i] = (*c).into();
        }
        let spec = crate::sigcore::spectrum::fft(&hx);
        let inv: Vec<_> = spec.iter().map(|v| v.inv()).collect();
        let g = crate::sigcore::spectrum::ifft(&inv);
        // Causal inverse taps live at lags 0.. (indices 15..).
        for lag in 0..10 {
            assert!((k.h1[15 + lag] - g[lag].re).abs() < 2e-3, "lag {lag}");
        }
    }

    #[test]
    fn ill_conditioned_fit_is_reported() {
        let x = vec![0.0; 1000];
        let err = fit_volterra(&x, &x, &VolterraStructure::linear(5)).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn too_short_training_is_rejected() {
        let x = random_signal(50, 7);
        assert!(fit_volterra(&x, &x, &VolterraStructure::default()).is_err());
    }

    #[test]
    fn default_structure_term_counts() {
        let s = VolterraStructure::default();
        assert_eq!(s.second_order_terms().len(), 13);
        assert_eq!(s.third_order_terms().len(), 19);
        assert_eq!(s.coefficient_count(), 31 + 13 + 19);
        let full = VolterraStructure {
            memory: 31,
            nonlinear_memory: 31,
            second_order: Pruning::Full,
            third_order: Pruning::Full,
        };
        assert_eq!(full.second_order_terms().len(), 31 * 32 / 2);
        assert_eq!(full.third_order_terms().len(), 31 * 32 * 33 / 6);
    }
}
