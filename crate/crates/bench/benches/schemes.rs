use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use tamed_euler::estimators::{strong_error_curve, MonteCarloPlan};
use tamed_euler::{
    simulate, BrownianFabric, LennardJonesPair, LennardJonesPairParams, PowerLaw, SchemeSettings,
};

fn fabric(c: &mut Criterion) {
    c.bench_function("sample_fabric_2^16", |b| {
        b.iter(|| BrownianFabric::sample(1, black_box(17), 1.0, 1 << 16, 1).unwrap())
    });
    let fine = BrownianFabric::sample(1, 17, 1.0, 1 << 16, 1).unwrap();
    c.bench_function("coarsen_2^16_to_2^6", |b| {
        b.iter(|| fine.coarsen(black_box(64)).unwrap())
    });
}

fn stepping(c: &mut Criterion) {
    let power = PowerLaw::new(3.0).unwrap();
    let config = SchemeSettings::tamed_for(&power, 1.0, 1.0).at_steps(4096);
    let fab = BrownianFabric::sample(2, 0, 1.0, 4096, 1).unwrap();
    c.bench_function("simulate_power_law_4096", |b| {
        b.iter(|| simulate(&power, black_box(&config), &fab).unwrap())
    });

    let pair = LennardJonesPair::new(LennardJonesPairParams::default(), [0.0, 1.0]).unwrap();
    let config = SchemeSettings::tamed_for(&pair, 1.0, 1.0).at_steps(4096);
    let fab = BrownianFabric::sample(2, 0, 1.0, 4096, 2).unwrap();
    c.bench_function("simulate_lj_pair_4096", |b| {
        b.iter(|| simulate(&pair, black_box(&config), &fab).unwrap())
    });
}

fn estimator(c: &mut Criterion) {
    let power = PowerLaw::new(3.0).unwrap();
    let settings = SchemeSettings::tamed_for(&power, 1.0, 1.0);
    let plan = MonteCarloPlan {
        levels: vec![16, 32, 64],
        samples: 64,
        master_seed: 0,
        n_ref_multiplier: 16,
    };
    let mut group = c.benchmark_group("estimators");
    group.sample_size(10);
    group.bench_function("strong_error_curve_small", |b| {
        b.iter(|| strong_error_curve(&power, &settings, black_box(&plan), 2.0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, fabric, stepping, estimator);
criterion_main!(benches);
