//! Benchmarks for sqzkit-core

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sqzkit_core::network::{run_scenario, NetworkScenario};
use sqzkit_core::reference::fiber_setups;
use sqzkit_core::{
    correction_pipeline, fit_opo_curve, squeezing_spectrum, FitFixed, FitPoint, QuadraturePair,
};

fn bench_spectrum(c: &mut Criterion) {
    c.bench_function("squeezing_spectrum", |b| {
        b.iter(|| squeezing_spectrum(black_box(0.34), black_box(0.41), black_box(1e-4)))
    });
}

fn bench_correction(c: &mut Criterion) {
    let setups = fiber_setups();
    c.bench_function("correction_pipeline_three_setups", |b| {
        b.iter(|| {
            for s in &setups {
                let _ = correction_pipeline(
                    black_box(&s.record),
                    &s.detection_chain(),
                    &s.source,
                    &s.coupling,
                );
            }
        })
    });
}

fn bench_fit(c: &mut Criterion) {
    let fixed = FitFixed {
        sideband_frequency: 3e6,
        bandwidth: 800e6,
    };
    let data: Vec<FitPoint> = [0.01, 0.03, 0.05, 0.07, 0.1]
        .iter()
        .map(|&p| {
            let q = squeezing_spectrum(0.2, (p / 1.2f64).sqrt(), fixed.omega()).unwrap();
            FitPoint::new(p, q.squeezing_db(), q.antisqueezing_db())
        })
        .collect();
    c.bench_function("fit_opo_curve_5_points", |b| {
        b.iter(|| fit_opo_curve(black_box(&data), fixed))
    });
}

fn bench_network(c: &mut Criterion) {
    let scenario = NetworkScenario::binary_tree(QuadraturePair::new(0.5, 2.0).unwrap());
    c.bench_function("binary_tree_network", |b| {
        b.iter(|| run_scenario(black_box(&scenario)))
    });
}

criterion_group!(
    benches,
    bench_spectrum,
    bench_correction,
    bench_fit,
    bench_network
);
criterion_main!(benches);
