use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use widelink_core::harness::{run_link, Band, LinkConfig};
use widelink_core::rng::Seed;
use widelink_core::rxdsp::{ffe_train_apply, gmi_ngmi, llr_compute, FfeConfig};
use widelink_core::shaping::{
    ccdm_encode, ccdm_input_bits, uniform_frame, Composition, PamAlphabet,
};
use widelink_core::sigcore::{Domain, SampledWaveform};
use widelink_core::txdsp::{band_split, fit_volterra, rrc_upsample, BandPlan, VolterraStructure};

fn levels(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn ccdm(c: &mut Criterion) {
    let comp = Composition::new(vec![300, 250, 200, 150, 80, 44]).unwrap();
    let mut rng = StdRng::seed_from_u64(1);
    let bits: Vec<u8> = (0..ccdm_input_bits(&comp))
        .map(|_| rng.random_range(0..2))
        .collect();
    c.bench_function("ccdm_encode_1024", |b| {
        b.iter(|| ccdm_encode(black_box(&bits), &comp).unwrap())
    });
}

fn pulse_and_split(c: &mut Criterion) {
    let mut g = c.benchmark_group("waveform");
    for n in [4096usize, 32768] {
        let s = levels(n, 2);
        g.bench_with_input(BenchmarkId::new("rrc_upsample", n), &s, |b, s| {
            b.iter(|| rrc_upsample(black_box(s), 216e9, 2, 0.01).unwrap())
        });
        let x = SampledWaveform::from_real(512e9, &levels(2 * n, 3), Domain::Electrical).unwrap();
        let plan = BandPlan::c_band();
        g.bench_with_input(BenchmarkId::new("band_split", 2 * n), &x, |b, x| {
            b.iter(|| band_split(black_box(x), &plan).unwrap())
        });
    }
    g.finish();
}

fn equalizer(c: &mut Criterion) {
    let reference = levels(16384, 4);
    let received: Vec<f64> = (0..2 * reference.len())
        .map(|i| {
            if i % 2 == 0 {
                reference[i / 2]
            } else {
                0.5 * (reference[i / 2] + reference[(i / 2 + 1) % reference.len()])
            }
        })
        .collect();
    let cfg = FfeConfig::default();
    c.bench_function("ffe_101_taps_16k", |b| {
        b.iter(|| ffe_train_apply(black_box(&received), &reference, &cfg).unwrap())
    });
}

fn metrics(c: &mut Criterion) {
    let a = PamAlphabet::pam8();
    let frame = uniform_frame(&a, 65536, Seed::from(5)).unwrap();
    let mut rng = StdRng::seed_from_u64(6);
    let soft: Vec<f64> = frame
        .levels()
        .iter()
        .map(|v| v + 0.1 * rng.random_range(-1.0..1.0))
        .collect();
    let bits = frame.bits();
    c.bench_function("llr_gmi_pam8_64k", |b| {
        b.iter(|| {
            let l = llr_compute(black_box(&soft), &frame, None).unwrap();
            gmi_ngmi(&l, &bits, 3.0, 3).unwrap()
        })
    });
}

fn volterra(c: &mut Criterion) {
    let x = levels(8192, 7);
    let y: Vec<f64> = x.iter().map(|v| v - 0.1 * v * v * v).collect();
    let s = VolterraStructure::default();
    c.bench_function("fit_volterra_default_8k", |b| {
        b.iter(|| fit_volterra(black_box(&y), &x, &s).unwrap())
    });
}

fn end_to_end(c: &mut Criterion) {
    let mut cfg = LinkConfig::ideal(Band::O);
    cfg.sequence_length_symbols = 8192;
    let mut g = c.benchmark_group("link");
    g.sample_size(10);
    g.bench_function("ideal_o_band_8k", |b| {
        b.iter(|| run_link(black_box(&cfg)).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    ccdm,
    pulse_and_split,
    equalizer,
    metrics,
    volterra,
    end_to_end
);
criterion_main!(benches);
