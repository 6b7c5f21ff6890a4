use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lpball::ratefun::{
    ldp_rate_q_below_p, legendre_fenchel, log_mgf, mdp_rate_via_contraction, MixingRate,
};
use lpball::specfun::abs_moment;

fn bench_log_mgf(c: &mut Criterion) {
    c.bench_function("log_mgf_p2_q1", |b| {
        b.iter(|| black_box(log_mgf(black_box(0.3), black_box(-0.2), 2.0, 1.0).unwrap()))
    });
}

fn bench_conjugate(c: &mut Criterion) {
    let s1 = 1.1 * abs_moment(2.0, 1.0).unwrap();
    c.bench_function("legendre_fenchel_p2_q1", |b| {
        b.iter(|| black_box(legendre_fenchel(black_box(s1), 1.05, 2.0, 1.0).unwrap()))
    });
}

fn bench_contraction_rate(c: &mut Criterion) {
    let lln = abs_moment(2.0, 1.0).unwrap();
    let mut group = c.benchmark_group("ldp_rate_q_below_p");
    group.sample_size(10);
    group.bench_function("dirac_near_lln", |b| {
        b.iter(|| black_box(ldp_rate_q_below_p(1.05 * lln, 2.0, 1.0, &MixingRate::Dirac).unwrap()))
    });
    group.finish();
}

fn bench_mdp_contraction(c: &mut Criterion) {
    c.bench_function("mdp_rate_via_contraction", |b| {
        b.iter(|| black_box(mdp_rate_via_contraction(black_box(1.0), 2.0, 1.0).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_log_mgf,
    bench_conjugate,
    bench_contraction_rate,
    bench_mdp_contraction
);
criterion_main!(benches);
