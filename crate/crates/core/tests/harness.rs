use std::fs;

use widelink_core::channel::multicore_batch;
use widelink_core::harness::{
    config_digest, core_configs, emit_outputs, report, run_link, run_link_traced, sweep_entropy,
    sweep_symbol_rate, Band, LinkConfig, Modulation, ResultTable, RunManifest, SweepKind,
    CSV_HEADER,
};
use widelink_core::Stage;

fn short(mut c: LinkConfig, log2_len: u32) -> LinkConfig {
    c.sequence_length_symbols = 1 << log2_len;
    c
}

/// O-band preset with part of the noise moved into receiver-referred
/// electrical noise, so received optical power matters.
fn receiver_limited() -> LinkConfig {
    let mut c = short(LinkConfig::o_band_216g(), 13);
    c.rx.digitizer.relative_noise_rms = 0.10;
    c.rx.photodiode.thermal_noise_a2_hz = 3e-16;
    c
}

fn ideal_shaped(h: f64) -> LinkConfig {
    let mut c = LinkConfig::ideal(Band::C);
    c.modulation = Modulation::PsPam12 { entropy_bits: h };
    c
}

#[test]
fn repeated_runs_are_identical() {
    let c = short(LinkConfig::c_band_216g(), 13);
    assert_eq!(run_link_traced(&c).unwrap(), run_link_traced(&c).unwrap());
}

#[test]
fn different_seeds_change_noisy_results() {
    let c = short(LinkConfig::c_band_216g(), 13);
    let mut d = c.clone();
    d.seed += 1;
    assert_ne!(run_link(&c).unwrap(), run_link(&d).unwrap());
}

#[test]
fn preset_noise_gives_imperfect_but_decodable_link() {
    let c = short(LinkConfig::c_band_216g(), 14);
    let out = run_link_traced(&c).unwrap();
    let r = &out.report;
    assert!(r.ngmi > 0.0 && r.ngmi < 1.0, "{}", r.ngmi);
    assert!(r.ber > 0.0);
    assert!(r.required_code_rate.is_some());
    assert!(r.net_bitrate_gbps < r.achievable_bitrate_gbps);
    assert!(out.sync_peak_correlation > 0.5);
    assert!(out.dpd_training_nmse_db.is_some());
    assert_eq!(
        out.evaluated_symbols + out.equalizer.training_symbols,
        out.frame_symbols
    );
}

#[test]
fn uniform_entropy_on_an_ideal_link_gives_full_rate() {
    let h = 12f64.log2();
    let t = sweep_entropy(&ideal_shaped(3.0), &[3.585]).unwrap();
    assert_eq!(t.rows.len(), 1);
    let r = t.rows[0].report.as_ref().unwrap();
    assert_eq!(r.required_code_rate, Some(1.0));
    assert!(
        (r.net_bitrate_gbps - h * 216.0).abs() < 0.5,
        "{}",
        r.net_bitrate_gbps
    );
}

#[test]
fn repeated_entropies_get_distinct_seeds() {
    let t = sweep_entropy(&ideal_shaped(3.0), &[3.0, 3.0]).unwrap();
    assert_eq!(t.rows.len(), 2);
    assert_ne!(t.rows[0].seed, t.rows[1].seed);
    assert!(t.rows.iter().all(|r| r.report.is_some()));
}

#[test]
fn entropy_sweep_needs_shaped_modulation() {
    let e = sweep_entropy(&LinkConfig::o_band_216g(), &[3.0]).unwrap_err();
    assert_eq!(e.stage(), None);
}

#[test]
fn symbol_rate_rows_match_single_runs() {
    let base = short(LinkConfig::o_band_216g(), 13);
    let t = sweep_symbol_rate(&base, &[216.0, 400.0]).unwrap();
    assert_eq!(t.rows.len(), 2);
    let first = t.rows.iter().find(|r| r.parameter == 216.0).unwrap();
    assert_eq!(first.report.as_ref(), Some(&run_link(&base).unwrap()));
    let r = first.report.as_ref().unwrap();
    assert_eq!(
        r.net_bitrate_gbps,
        3.0 * r.required_code_rate.unwrap() * 216.0
    );
    // 400 GBd does not fit the band plan; only that row fails.
    let bad = t.rows.iter().find(|r| r.parameter == 400.0).unwrap();
    assert!(bad.report.is_none());
    assert!(
        bad.error.as_deref().unwrap().starts_with("[config]"),
        "{:?}",
        bad.error
    );
}

#[test]
fn ngmi_degrades_with_symbol_rate_on_a_band_limited_front_end() {
    let base = short(LinkConfig::o_band_216g(), 13);
    let t = sweep_symbol_rate(&base, &[150.0, 180.0, 216.0]).unwrap();
    let ngmi: Vec<f64> = t.reports().map(|(_, m)| m.ngmi).collect();
    assert_eq!(ngmi.len(), 3);
    let inversions = ngmi.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(inversions <= 1, "{ngmi:?}");
    assert!(ngmi[2] < ngmi[0], "{ngmi:?}");
    for (row, m) in t.reports() {
        let r = m.required_code_rate.unwrap_or(0.0);
        assert_eq!(m.net_bitrate_gbps, 3.0 * r * row.parameter);
    }
}

#[test]
fn failures_are_tagged_with_their_stage() {
    let mut c = LinkConfig::ideal(Band::C);
    c.tx.drive_rms_vpi = 0.0;
    assert_eq!(run_link(&c).unwrap_err().stage(), Some(Stage::Config));
}

#[test]
fn emitted_outputs_are_complete_and_reproducible() {
    let base = ideal_shaped(3.0);
    let hs = [2.5, 2.75, 3.0, 3.25, 3.5];
    let t = sweep_entropy(&base, &hs).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let files = emit_outputs(&t, &base, a.path()).unwrap();
    emit_outputs(&t, &base, b.path()).unwrap();

    let csv = fs::read_to_string(&files.csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), hs.len() + 1);
    assert_eq!(lines[0], CSV_HEADER.join(","));
    assert_eq!(
        csv,
        fs::read_to_string(b.path().join("results.csv")).unwrap()
    );

    let svg = fs::read_to_string(files.plot.as_ref().unwrap()).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert!(doc
        .descendants()
        .any(|n| n.tag_name().name() == "polyline" || n.tag_name().name() == "path"));

    let manifest: RunManifest =
        serde_json::from_str(&fs::read_to_string(&files.manifest).unwrap()).unwrap();
    assert_eq!(manifest.sweep, SweepKind::Entropy);
    assert_eq!(manifest.parameters, hs.to_vec());
    assert_eq!(manifest.config_digest, config_digest(&base));
    assert_eq!(manifest.config, base);

    let reread = report(a.path()).unwrap();
    assert_eq!(reread.rows.len(), hs.len());
    for (x, y) in reread.rows.iter().zip(&t.rows) {
        assert_eq!(x.parameter, y.parameter);
        assert_eq!(
            x.report.as_ref().map(|m| m.net_bitrate_gbps),
            y.report.as_ref().map(|m| m.net_bitrate_gbps)
        );
    }
}

#[test]
fn empty_table_writes_header_and_manifest_only() {
    let dir = tempfile::tempdir().unwrap();
    let files = emit_outputs(
        &ResultTable::new(SweepKind::Entropy),
        &LinkConfig::ideal(Band::C),
        dir.path(),
    )
    .unwrap();
    assert_eq!(fs::read_to_string(&files.csv).unwrap().lines().count(), 1);
    assert!(files.plot.is_none());
    assert!(files.manifest.exists());
}

#[test]
fn report_of_a_missing_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let e = report(&dir.path().join("absent")).unwrap_err();
    assert!(e.to_string().contains("results.csv"), "{e}");
}

#[test]
fn uncoupled_cores_behave_alike() {
    let base = receiver_limited();
    let reports = multicore_batch(&core_configs(&base, 4)).unwrap();
    let ngmi: Vec<f64> = reports.iter().map(|r| r.ngmi).collect();
    let spread = ngmi.iter().cloned().fold(f64::MIN, f64::max)
        - ngmi.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.02, "{ngmi:?}");
}

#[test]
fn extra_loss_on_one_core_makes_it_the_worst() {
    let base = receiver_limited();
    let mut configs = core_configs(&base, 4);
    configs[2].channel.extra_loss_db = 3.0;
    let reports = multicore_batch(&configs).unwrap();
    let worst = (0..4)
        .min_by(|&a, &b| reports[a].ngmi.partial_cmp(&reports[b].ngmi).unwrap())
        .unwrap();
    assert_eq!(
        worst,
        2,
        "{:?}",
        reports.iter().map(|r| r.ngmi).collect::<Vec<_>>()
    );
}

#[test]
fn one_core_batch_equals_a_plain_run() {
    let base = short(LinkConfig::o_band_216g(), 13);
    let configs = core_configs(&base, 1);
    assert_eq!(
        multicore_batch(&configs).unwrap(),
        vec![run_link(&configs[0]).unwrap()]
    );
}
