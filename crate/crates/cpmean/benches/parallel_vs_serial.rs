// SPDX-License-Identifier: MIT OR Apache-2.0

//! Rayon pool vs a single worker on the data-parallel kernels.
//!
//! The single-thread pool stands in for the sequential build; run
//! `cargo bench --no-default-features` for the plain loops.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cpmean::hierarchical::{make_grid, wbs, GridKind};
use cpmean::sim::{add_noise, gen_signal, run_scenario, Noise, Signal, SimScenario};
use cpmean::windowed::mosum_profile;
use cpmean::{DetectSpec, Method, TimeSeries};
use rayon::{ThreadPool, ThreadPoolBuilder};
use std::hint::black_box;

fn pools() -> [(&'static str, ThreadPool); 2] {
    [
        ("serial", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn blocks(n: usize) -> TimeSeries {
    let (s, _) = gen_signal(&Signal::Blocks { n }).unwrap();
    let x = add_noise(&s, &Noise::Gaussian { sd: 1.0 }, 1).unwrap();
    TimeSeries::new(x, true).unwrap()
}

fn wbs_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("wbs");
    g.sample_size(20);
    for n in [2_000usize, 10_000] {
        let ts = blocks(n);
        let grid = make_grid(n, GridKind::Random { seed: 3, m: 5_000 }).unwrap();
        for (name, pool) in pools() {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                pool.install(|| b.iter(|| wbs(black_box(&ts), &grid, 0.0).unwrap()))
            });
        }
    }
    g.finish();
}

fn mosum(c: &mut Criterion) {
    let mut g = c.benchmark_group("mosum_profile");
    for n in [10_000usize, 100_000] {
        let ts = blocks(n);
        for (name, pool) in pools() {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                pool.install(|| b.iter(|| mosum_profile(black_box(&ts), 100).unwrap()))
            });
        }
    }
    g.finish();
}

fn scenario(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_scenario");
    g.sample_size(10);
    let sc = SimScenario {
        signal: Signal::Blocks { n: 1024 },
        noise: Noise::Gaussian { sd: 1.0 },
        seed: 5,
        reps: 64,
    };
    let spec = DetectSpec::new(Method::Wbs2);
    for (name, pool) in pools() {
        g.bench_function(name, |b| {
            pool.install(|| b.iter(|| run_scenario(black_box(&sc), &spec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, wbs_grid, mosum, scenario);
criterion_main!(benches);
