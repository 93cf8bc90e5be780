use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use stripstab::greenfn::GreenApprox;
use stripstab::{hopf, neutral, orrsomm, Complex64, MeanFlowGauge, ShearProfile, SpectralDiscretization};

const NU: f64 = 8e-5;
const ALPHA: f64 = 2.1;

fn discretization(c: &mut Criterion) {
    let mut g = c.benchmark_group("discretization");
    for n in [64, 128, 256] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| SpectralDiscretization::new(black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn dense_spectrum(c: &mut Criterion) {
    let profile = ShearProfile::poiseuille();
    let mut g = c.benchmark_group("dense_spectrum");
    g.sample_size(10);
    for n in [64, 128] {
        let disc = SpectralDiscretization::new(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &disc, |b, disc| {
            b.iter(|| orrsomm::spectrum(&profile, ALPHA, NU, disc).unwrap())
        });
    }
    g.finish();
}

fn continuation(c: &mut Criterion) {
    let profile = ShearProfile::poiseuille();
    let disc = SpectralDiscretization::new(128).unwrap();
    let path: Vec<(f64, f64)> = (0..8).map(|k| (ALPHA + 0.01 * k as f64, NU)).collect();
    let mut g = c.benchmark_group("continuation");
    g.sample_size(10);
    g.bench_function("rqi_8_steps_n128", |b| {
        b.iter(|| neutral::track_eigenvalue(&profile, black_box(&path), &disc).unwrap())
    });
    g.finish();
}

fn green_convolution(c: &mut Criterion) {
    let disc = SpectralDiscretization::new(64).unwrap();
    let green = GreenApprox::from_lambda(2.0, Complex64::new(0.0, 1e3), 1e-2).unwrap();
    let mut g = c.benchmark_group("green_convolution");
    g.sample_size(10);
    g.bench_function("matrix_n64", |b| b.iter(|| green.convolution_matrix(black_box(&disc)).unwrap()));
    g.finish();
}

fn hopf_coefficients(c: &mut Criterion) {
    let profile = ShearProfile::poiseuille();
    let disc = SpectralDiscretization::new(64).unwrap();
    let np = neutral::locate_neutral(&profile, NU, neutral::Branch::Upper, &disc)
        .unwrap()
        .unwrap();
    let mut g = c.benchmark_group("hopf");
    g.sample_size(10);
    g.bench_function("coefficients_n64", |b| {
        b.iter(|| hopf::compute_hopf(&profile, &np, &disc, MeanFlowGauge::Pressure).unwrap())
    });
    g.finish();
}

criterion_group!(benches, discretization, dense_spectrum, continuation, green_convolution, hopf_coefficients);
criterion_main!(benches);
