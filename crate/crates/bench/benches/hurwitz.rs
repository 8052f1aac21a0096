// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use cheb_bench::chi4;
use cheb_core::lfunc::{hurwitz_zeta, l_value};
use cheb_core::Complex64;
use criterion::{criterion_group, BenchmarkId, Criterion};

fn hurwitz(c: &mut Criterion) {
    let mut group = c.benchmark_group("hurwitz");
    for t in [10.0, 100.0, 500.0] {
        let s = Complex64::new(0.5, t);
        group.bench_with_input(BenchmarkId::new("zeta(1/2+it, 1/3)", t), &s, |b, s| {
            b.iter(|| hurwitz_zeta(black_box(*s), 1.0 / 3.0).unwrap())
        });
    }
    let chi = chi4();
    group.bench_function("L(1/2+100i, chi_4)", |b| {
        b.iter(|| l_value(&chi, black_box(Complex64::new(0.5, 100.0))).unwrap())
    });
    group.finish();
}

criterion_group!(benches, hurwitz);
