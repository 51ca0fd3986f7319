use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{LinkConfig, Modulation};
use super::link::run_link;
use crate::channel::FiberSpec;
use crate::error::{Error, Result, Stage};
use crate::rxdsp::MetricsReport;

/// What a result table varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Run,
    Entropy,
    SymbolRate,
    Cores,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::Run => "run",
            SweepKind::Entropy => "entropy",
            SweepKind::SymbolRate => "symbol_rate",
            SweepKind::Cores => "cores",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            SweepKind::Run,
            SweepKind::Entropy,
            SweepKind::SymbolRate,
            SweepKind::Cores,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }

    /// Axis label of the swept parameter.
    pub fn parameter_label(self) -> &'static str {
        match self {
            SweepKind::Run => "Run",
            SweepKind::Entropy => "Entropy (bit/symbol)",
            SweepKind::SymbolRate => "Symbol rate (GBd)",
            SweepKind::Cores => "Core",
        }
    }
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Position in the requested parameter list.
    pub index: usize,
    pub parameter: f64,
    pub seed: u64,
    pub report: Option<MetricsReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
    /// Soft-check findings (e.g. a non-unimodal entropy curve).
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl ResultTable {
    pub fn new(kind: SweepKind) -> Self {
        ResultTable {
            kind,
            rows: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Rows that produced a report.
    pub fn reports(&self) -> impl Iterator<Item = (&SweepRow, &MetricsReport)> {
        self.rows
            .iter()
            .filter_map(|r| r.report.as_ref().map(|m| (r, m)))
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Runs every configuration in parallel; results keep the input order.
pub fn run_all(configs: &[LinkConfig]) -> Vec<Result<MetricsReport>> {
    configs.par_iter().map(run_link).collect()
}

fn table_from(
    kind: SweepKind,
    params: &[f64],
    configs: Vec<(u64, Result<LinkConfig>)>,
) -> ResultTable {
    let outcomes: Vec<(u64, Result<MetricsReport>)> = configs
        .into_par_iter()
        .map(|(seed, c)| (seed, c.and_then(|cfg| run_link(&cfg))))
        .collect();
    let mut rows: Vec<SweepRow> = outcomes
        .into_iter()
        .enumerate()
        .map(|(i, (seed, outcome))| {
            let (report, error) = match outcome {
                Ok(r) => (Some(r), None),
                Err(e) => {
                    log::warn!("{} point {i} failed: {e}", kind.as_str());
                    (None, Some(error_chain(&e)))
                }
            };
            SweepRow {
                index: i,
                parameter: params[i],
                seed,
                report,
                error,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.parameter
            .total_cmp(&b.parameter)
            .then(a.index.cmp(&b.index))
    });
    ResultTable {
        kind,
        rows,
        warnings: Vec::new(),
    }
}

fn checked(c: LinkConfig) -> (u64, Result<LinkConfig>) {
    (
        c.seed,
        c.validate().map(|_| c).map_err(|e| e.at(Stage::Config)),
    )
}

/// Error message with its cause chain on one line.
pub fn error_chain(e: &Error) -> String {
    let mut s = e.to_string();
    let mut src = std::error::Error::source(e);
    while let Some(c) = src {
        // Most messages already embed their cause.
        let m = c.to_string();
        if !s.ends_with(&m) {
            s.push_str(": ");
            s.push_str(&m);
        }
        src = c.source();
    }
    s
}

/// Whether `values` rise (allowing dips up to `tolerance`) to a maximum and
/// then stay flat or fall (allowing rises up to `tolerance`).
pub fn is_unimodal(values: &[f64], tolerance: f64) -> bool {
    if values.len() < 3 {
        return true;
    }
    let peak = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v > values[b] { i } else { b });
    let rising = values[..=peak].windows(2).all(|w| w[1] >= w[0] - tolerance);
    let falling = values[peak..].windows(2).all(|w| w[1] <= w[0] + tolerance);
    rising && falling
}

/// One run per entropy of the shaped PAM12 format. Point `i` uses seed
/// `base.seed + i`, so repeated entropies give distinct rows.
pub fn sweep_entropy(base: &LinkConfig, entropies: &[f64]) -> Result<ResultTable> {
    if !matches!(base.modulation, Modulation::PsPam12 { .. }) {
        return Err(Error::Config(
            "entropy sweeps need the ps_pam12 modulation".into(),
        ));
    }
    let configs = entropies
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let mut c = base.clone();
            c.modulation = Modulation::PsPam12 { entropy_bits: h };
            c.seed = base.seed.wrapping_add(i as u64);
            checked(c)
        })
        .collect();
    let mut table = table_from(SweepKind::Entropy, entropies, configs);
    let net: Vec<f64> = table.reports().map(|(_, r)| r.net_bitrate_gbps).collect();
    // Tolerance: one code-rate step of the placeholder table at 216 GBd.
    let tol = 0.05 * 4.0 * base.symbol_rate_gbd;
    if !is_unimodal(&net, tol) {
        let msg = "net bitrate versus entropy is neither unimodal nor saturating".to_string();
        log::warn!("{msg}");
        table.warnings.push(msg);
    }
    Ok(table)
}

/// One run per symbol rate. The band plan is checked against each rate's
/// occupied band and the frame length re-derived; points that do not fit
/// become error rows.
pub fn sweep_symbol_rate(base: &LinkConfig, rates_gbd: &[f64]) -> Result<ResultTable> {
    let configs = rates_gbd
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let mut c = base.clone();
            c.symbol_rate_gbd = b;
            c.seed = base.seed.wrapping_add(i as u64);
            checked(c)
        })
        .collect();
    Ok(table_from(SweepKind::SymbolRate, rates_gbd, configs))
}

/// Per-core configurations for an `n`-core fiber: core `k` uses
/// [`FiberSpec::four_core`]`(k)` and seed `base.seed + k`.
pub fn core_configs(base: &LinkConfig, n: usize) -> Vec<LinkConfig> {
    (0..n)
        .map(|k| {
            let mut c = base.clone();
            c.channel.fiber = Some(FiberSpec::four_core(k));
            c.seed = base.seed.wrapping_add(k as u64);
            c
        })
        .collect()
}

/// Multi-core batch as a result table (parameter = core number from 1).
pub fn sweep_cores(base: &LinkConfig, n: usize) -> Result<ResultTable> {
    if n == 0 {
        return Err(Error::Config("need at least one core".into()));
    }
    let configs = core_configs(base, n);
    let params: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    Ok(table_from(
        SweepKind::Cores,
        &params,
        configs.into_iter().map(checked).collect(),
    ))
}

/// Single run as a one-row table.
pub fn single_run(cfg: &LinkConfig) -> ResultTable {
    table_from(
        SweepKind::Run,
        &[cfg.seed as f64],
        vec![checked(cfg.clone())],
    )
}
