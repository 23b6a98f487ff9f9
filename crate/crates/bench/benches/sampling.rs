use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use skglass_core::mc::{metropolis, parallel_tempering, simulated_annealing_ground_state, AnnealSchedule, ChainConfig};
use skglass_core::model::sample_couplings;

fn chains(c: &mut Criterion) {
    let j = sample_couplings(64, 3).unwrap();
    let mut group = c.benchmark_group("mc");
    group.sample_size(10);
    group.bench_function("metropolis_n64_2000_sweeps", |b| {
        let cfg = ChainConfig::single(1.0, 2_000, 200, 5);
        b.iter(|| metropolis(black_box(&j), &cfg).unwrap())
    });
    group.bench_function("tempering_n64_8_rungs_500_sweeps", |b| {
        let ladder: Vec<f64> = (0..8).map(|k| 0.3 * 1.3f64.powi(k)).collect();
        let cfg = ChainConfig::single(1.0, 500, 50, 5).with_ladder(ladder);
        b.iter(|| parallel_tempering(black_box(&j), &cfg).unwrap())
    });
    let small = sample_couplings(18, 4).unwrap();
    group.bench_function("annealing_n18_one_restart", |b| {
        let schedule = AnnealSchedule::default();
        b.iter(|| simulated_annealing_ground_state(black_box(&small), &schedule, 1, 9).unwrap())
    });
    group.finish();
}

criterion_group!(benches, chains);
criterion_main!(benches);
