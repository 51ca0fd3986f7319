use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::LinkConfig;
use super::sweep::{ResultTable, SweepKind, SweepRow};
use crate::error::{Error, Result};
use crate::rxdsp::MetricsReport;

pub const CSV_FILE: &str = "results.csv";
pub const PLOT_FILE: &str = "plot.svg";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Column order of `results.csv`.
pub const CSV_HEADER: [&str; 16] = [
    "sweep",
    "index",
    "parameter",
    "seed",
    "symbol_rate_gbd",
    "entropy_bits",
    "label_bits",
    "ber",
    "bit_errors",
    "gmi_bits",
    "ngmi",
    "required_code_rate",
    "achievable_bitrate_gbps",
    "net_bitrate_gbps",
    "noise_variance",
    "error",
];

/// Everything needed to reproduce a result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub artifact_version: String,
    pub generator: String,
    pub timestamp: String,
    pub sweep: SweepKind,
    pub parameters: Vec<f64>,
    pub seeds: Vec<u64>,
    /// SHA-256 of the resolved configuration document below.
    pub config_digest: String,
    pub config: LinkConfig,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
}

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmittedFiles {
    pub csv: PathBuf,
    pub plot: Option<PathBuf>,
    pub manifest: PathBuf,
}

pub fn config_digest(cfg: &LinkConfig) -> String {
    let d = Sha256::digest(cfg.to_json().as_bytes());
    d.iter().map(|b| format!("{b:02x}")).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn row_record(kind: SweepKind, row: &SweepRow) -> Vec<String> {
    let r = row.report.as_ref();
    vec![
        kind.as_str().to_string(),
        row.index.to_string(),
        row.parameter.to_string(),
        row.seed.to_string(),
        opt(r.map(|m| m.symbol_rate_gbd)),
        opt(r.map(|m| m.entropy_bits)),
        r.map(|m| m.label_bits.to_string()).unwrap_or_default(),
        opt(r.map(|m| m.ber)),
        r.map(|m| m.bit_errors.to_string()).unwrap_or_default(),
        opt(r.map(|m| m.gmi_bits)),
        opt(r.map(|m| m.ngmi)),
        opt(r.and_then(|m| m.required_code_rate)),
        opt(r.map(|m| m.achievable_bitrate_gbps)),
        opt(r.map(|m| m.net_bitrate_gbps)),
        opt(r.map(|m| m.noise_variance)),
        row.error.clone().unwrap_or_default(),
    ]
}

/// Serializes the table; floats use the shortest round-trip form.
pub fn table_to_csv(table: &ResultTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Numerical(format!("CSV encoding failed: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row_record(table.kind, row))
            .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Numerical(format!("CSV encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Parses a table written by [`table_to_csv`].
pub fn table_from_csv(text: &str) -> Result<ResultTable> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let bad = |m: String| Error::Config(format!("results CSV: {m}"));
    let header = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(bad("unexpected header".into()));
    }
    let mut kind = None;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<Option<f64>> {
            match field(i) {
                "" => Ok(None),
                s => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| bad(format!("column {} holds {s:?}", CSV_HEADER[i]))),
            }
        };
        let int = |i: usize| -> Result<Option<u64>> {
            match field(i) {
                "" => Ok(None),
                s => s
                    .parse::<u64>()
                    .map(Some)
                    .map_err(|_| bad(format!("column {} holds {s:?}", CSV_HEADER[i]))),
            }
        };
        let k = SweepKind::parse(field(0))
            .ok_or_else(|| bad(format!("unknown sweep {:?}", field(0))))?;
        kind.get_or_insert(k);
        let error = Some(field(15).to_string()).filter(|s| !s.is_empty());
        let report = match (num(10)?, error.is_none()) {
            (Some(ngmi), true) => Some(MetricsReport {
                ber: num(7)?.unwrap_or(f64::NAN),
                bit_errors: int(8)?.unwrap_or(0) as usize,
                gmi_bits: num(9)?.unwrap_or(f64::NAN),
                gmi_std_err: f64::NAN,
                ngmi,
                required_code_rate: num(11)?,
                achievable_bitrate_gbps: num(12)?.unwrap_or(f64::NAN),
                net_bitrate_gbps: num(13)?.unwrap_or(f64::NAN),
                symbol_rate_gbd: num(4)?.unwrap_or(f64::NAN),
                entropy_bits: num(5)?.unwrap_or(f64::NAN),
                label_bits: int(6)?.unwrap_or(0) as usize,
                noise_variance: num(14)?.unwrap_or(f64::NAN),
                manifest: None,
            }),
            _ => None,
        };
        rows.push(SweepRow {
            index: int(1)?.unwrap_or(0) as usize,
            parameter: num(2)?.unwrap_or(f64::NAN),
            seed: int(3)?.unwrap_or(0),
            report,
            error,
        });
    }
    Ok(ResultTable {
        kind: kind.unwrap_or(SweepKind::Run),
        rows,
        warnings: Vec::new(),
    })
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    step * mag
}

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0, 0.2);
    }
    if hi - lo < 1e-9 * hi.abs().max(1.0) {
        let pad = if hi.abs() > 0.0 { 0.05 * hi.abs() } else { 1.0 };
        lo -= pad;
        hi += pad;
    }
    let step = nice_step(hi - lo);
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    format!("{v:.decimals$}")
}

struct Series<'a> {
    name: &'a str,
    color: &'a str,
    points: Vec<(f64, f64)>,
}

#[allow(clippy::too_many_arguments)]
fn panel(
    out: &mut String,
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xlabel: &str,
    ylabel: &str,
    series: &[Series],
) {
    let (xa, xb, xs) = axis_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (ya, yb, ys) = axis_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let px = |x: f64| x0 + (x - xa) / (xb - xa) * w;
    let py = |y: f64| y0 + h - (y - ya) / (yb - ya) * h;
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
    );
    let mut t = xa;
    while t <= xb + 1e-9 * xs {
        let x = px(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            y0 + h,
            y0 + h + 5.0,
            y0 + h + 18.0,
            fmt_tick(t, xs)
        );
        t += xs;
    }
    let mut t = ya;
    while t <= yb + 1e-9 * ys {
        let y = py(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            fmt_tick(t, ys)
        );
        t += ys;
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
        x0 + w / 2.0,
        y0 + h + 40.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        x0 - 50.0,
        y0 + h / 2.0,
        x0 - 50.0,
        y0 + h / 2.0,
        escape(ylabel)
    );
    for (k, s) in series.iter().enumerate() {
        if s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                path.join(" "),
                s.color
            );
        }
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                px(x),
                py(y),
                s.color
            );
        }
        let ly = y0 + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{ly:.2}" font-size="11" fill="{}">{}</text>"#,
            x0 + 8.0,
            s.color,
            escape(s.name)
        );
    }
}

/// Two-panel plot (bitrates and NGMI versus the swept parameter); `None`
/// when no row has a report.
pub fn render_svg(table: &ResultTable) -> Option<String> {
    let pts: Vec<(f64, &MetricsReport)> =
        table.reports().map(|(row, r)| (row.parameter, r)).collect();
    if pts.is_empty() {
        return None;
    }
    let xlabel = table.kind.parameter_label();
    let (w, h) = (420.0, 300.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">"#,
        2.0 * w + 200.0,
        h + 90.0
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    panel(
        &mut out,
        80.0,
        20.0,
        w,
        h,
        xlabel,
        "Bitrate (Gb/s)",
        &[
            Series {
                name: "achievable",
                color: "#1f77b4",
                points: pts
                    .iter()
                    .map(|(x, r)| (*x, r.achievable_bitrate_gbps))
                    .collect(),
            },
            Series {
                name: "net",
                color: "#d62728",
                points: pts.iter().map(|(x, r)| (*x, r.net_bitrate_gbps)).collect(),
            },
        ],
    );
    panel(
        &mut out,
        w + 180.0,
        20.0,
        w,
        h,
        xlabel,
        "NGMI",
        &[Series {
            name: "NGMI",
            color: "#2ca02c",
            points: pts.iter().map(|(x, r)| (*x, r.ngmi)).collect(),
        }],
    );
    out.push_str("</svg>\n");
    Some(out)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `results.csv`, `plot.svg` (when any row succeeded) and
/// `manifest.json` into `out_dir`, creating it if needed.
pub fn emit_outputs(
    table: &ResultTable,
    config: &LinkConfig,
    out_dir: &Path,
) -> Result<EmittedFiles> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let csv_path = out_dir.join(CSV_FILE);
    write(&csv_path, &table_to_csv(table)?)?;
    let plot = match render_svg(table) {
        Some(svg) => {
            let p = out_dir.join(PLOT_FILE);
            write(&p, &svg)?;
            Some(p)
        }
        None => None,
    };
    let mut outputs = vec![CSV_FILE.to_string()];
    if plot.is_some() {
        outputs.push(PLOT_FILE.to_string());
    }
    let manifest = RunManifest {
        artifact: env!("CARGO_PKG_NAME").to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        generator: config.generator.versioned_name().to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        sweep: table.kind,
        parameters: table.rows.iter().map(|r| r.parameter).collect(),
        seeds: table.rows.iter().map(|r| r.seed).collect(),
        config_digest: config_digest(config),
        config: config.clone(),
        outputs,
        warnings: table.warnings.clone(),
    };
    let manifest_path = out_dir.join(MANIFEST_FILE);
    write(
        &manifest_path,
        &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(EmittedFiles {
        csv: csv_path,
        plot,
        manifest: manifest_path,
    })
}

/// Reads `results.csv` from `dir` and re-renders `plot.svg`.
pub fn report(dir: &Path) -> Result<ResultTable> {
    let csv_path = dir.join(CSV_FILE);
    let text = fs::read_to_string(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let table = table_from_csv(&text)?;
    if let Some(svg) = render_svg(&table) {
        write(&dir.join(PLOT_FILE), &svg)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table(n: usize) -> ResultTable {
        let rows = (0..n)
            .map(|i| SweepRow {
                index: i,
                parameter: 3.0 + 0.1 * i as f64,
                seed: 10 + i as u64,
                report: Some(MetricsReport {
                    ber: 1e-3 / (i + 1) as f64,
                    bit_errors: 7,
                    gmi_bits: 2.9,
                    gmi_std_err: 0.001,
                    ngmi: 0.9 + 0.01 * i as f64,
                    required_code_rate: Some(0.85),
                    achievable_bitrate_gbps: 600.0 + i as f64,
                    net_bitrate_gbps: 580.0,
                    symbol_rate_gbd: 216.0,
                    entropy_bits: 3.0 + 0.1 * i as f64,
                    label_bits: 4,
                    noise_variance: 0.01,
                    manifest: None,
                }),
                error: None,
            })
            .collect();
        ResultTable {
            kind: SweepKind::Entropy,
            rows,
            warnings: Vec::new(),
        }
    }

    #[test]
    fn csv_round_trip_is_stable() {
        let t = sample_table(3);
        let a = table_to_csv(&t).unwrap();
        let back = table_from_csv(&a).unwrap();
        assert_eq!(table_to_csv(&back).unwrap(), a);
        assert_eq!(back.rows.len(), 3);
        assert_eq!(
            back.rows[1].report.as_ref().unwrap().ngmi,
            t.rows[1].report.as_ref().unwrap().ngmi
        );
    }

    #[test]
    fn empty_table_has_no_plot() {
        let t = ResultTable::new(SweepKind::SymbolRate);
        assert!(render_svg(&t).is_none());
        assert_eq!(table_to_csv(&t).unwrap().lines().count(), 1);
    }

    #[test]
    fn ticks_are_round() {
        let (a, b, s) = axis_range([576.3, 611.9].into_iter());
        assert_eq!(s, 10.0);
        assert_eq!((a, b), (570.0, 620.0));
    }
}
