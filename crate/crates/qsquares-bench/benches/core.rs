use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qsquares::prover::normalize;
use qsquares::weierstrass::instantiate_tadd;
use qsquares::{cusp_representatives, prove, valence_bound, WeierstrassInstance};
use qsquares_bench::{level_105_product, statement};

fn expansion(c: &mut Criterion) {
    let p = level_105_product();
    let mut g = c.benchmark_group("expand");
    for t in [200, 1000, 4000] {
        g.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| p.expand(black_box(t)).unwrap())
        });
    }
    g.finish();
}

fn cusps(c: &mut Criterion) {
    let mut g = c.benchmark_group("cusps");
    for n in [20, 105, 240] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| cusp_representatives(black_box(n)).unwrap())
        });
    }
    g.finish();
    let terms = normalize(&statement("840m+361")).unwrap();
    let reps = cusp_representatives(105).unwrap();
    c.bench_function("valence_bound/105", |b| {
        b.iter(|| valence_bound(black_box(&terms), &reps).unwrap())
    });
}

fn proving(c: &mut Criterion) {
    for tag in ["6.8", "48m+1", "840m+361"] {
        let stmt = statement(tag);
        c.bench_function(&format!("prove/{}", tag), |b| {
            b.iter(|| prove(black_box(&stmt)).unwrap())
        });
    }
    let inst: WeierstrassInstance = "base=35 u=q^10 v=q^3 x=q^14 y=q^6".parse().unwrap();
    c.bench_function("tadd/35", |b| {
        b.iter(|| instantiate_tadd(black_box(&inst), 210).unwrap())
    });
}

criterion_group!(benches, expansion, cusps, proving);
criterion_main!(benches);
