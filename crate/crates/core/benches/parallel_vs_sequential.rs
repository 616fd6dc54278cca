//! Single-thread versus full-pool timings of the data-parallel kernels.
//!
//! `cargo bench -p nlbox-core` compares a one-thread rayon pool with the
//! default pool. Building with `--no-default-features` swaps in the purely
//! sequential code paths; both groups then measure the same thing.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlbox_core::boolfn::{fwht, sign_vector, TruthTable};
use nlbox_core::nlbc::{nlbc, NlbcOptions};
use nlbox_core::protocol::{brassard_maj3, monte_carlo_bias, InputDist};
use nlbox_core::search::verify_small_n;
use nlbox_core::twoparty::TwoPartyFunction;
use rayon::ThreadPoolBuilder;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let full = rayon::current_num_threads();
    let mut sizes = vec![1];
    if full > 1 {
        sizes.push(full);
    }
    sizes
        .into_iter()
        .map(|t| (format!("{t}-threads"), ThreadPoolBuilder::new().num_threads(t).build().unwrap()))
        .collect()
}

fn bench_rank(c: &mut Criterion) {
    let f = TwoPartyFunction::xor(TruthTable::majority(11).unwrap());
    let mut group = c.benchmark_group("mfprime_rank_maj11");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| pool.install(|| nlbc(&f, NlbcOptions::default()).unwrap()))
        });
    }
    group.finish();
}

fn bench_census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census_n4");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| pool.install(|| verify_small_n(4).unwrap()))
        });
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let p = brassard_maj3();
    let f = TwoPartyFunction::xor(TruthTable::majority(3).unwrap());
    let mut group = c.benchmark_group("monte_carlo_maj3_200k");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| pool.install(|| monte_carlo_bias(&p, &f, 0.9, 200_000, 7, &InputDist::Uniform).unwrap()))
        });
    }
    group.finish();
}

fn bench_fwht(c: &mut Criterion) {
    let g = TruthTable::from_fn(20, |z| (z.wrapping_mul(0x9e37_79b9) >> 7) & 1 == 1).unwrap();
    let signs = sign_vector(&g);
    let mut group = c.benchmark_group("fwht_n20");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| {
                let mut v = signs.clone();
                pool.install(|| fwht(&mut v));
                v
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_rank, bench_census, bench_monte_carlo, bench_fwht);
criterion_main!(benches);
