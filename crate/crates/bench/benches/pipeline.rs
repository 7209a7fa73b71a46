use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use frameforge::codegen::{emit, Dialect};
use frameforge::harness::run_suite;
use frameforge::pipeline::compile;
use frameforge::solver::solve;
use frameforge::verify::parse_script;
use frameforge::COORD_TOL;
use frameforge_bench::{compiled_suite, default_suite, emitted_suite};

fn bench_compile(c: &mut Criterion) {
    let suite = default_suite();
    c.bench_function("compile/suite", |b| {
        b.iter(|| {
            for p in &suite {
                black_box(compile(black_box(&p.spec), COORD_TOL).unwrap());
            }
        })
    });
}

fn bench_emit_and_parse(c: &mut Criterion) {
    let models = compiled_suite();
    let mut group = c.benchmark_group("dialect");
    for d in Dialect::ALL {
        group.bench_with_input(
            BenchmarkId::new("emit", d.program()),
            &models,
            |b, models| {
                b.iter(|| {
                    for m in models {
                        black_box(emit(m, d, COORD_TOL).unwrap());
                    }
                })
            },
        );
        let scripts = emitted_suite(&models, d);
        group.bench_with_input(
            BenchmarkId::new("parse", d.program()),
            &scripts,
            |b, scripts| {
                b.iter(|| {
                    for s in scripts {
                        black_box(parse_script(d, &s.text).unwrap());
                    }
                })
            },
        );
    }
    group.finish();
}

fn bench_solve(c: &mut Criterion) {
    let models = compiled_suite();
    c.bench_function("solve/suite", |b| {
        b.iter(|| {
            for m in &models {
                black_box(solve(m).unwrap());
            }
        })
    });
}

fn bench_harness(c: &mut Criterion) {
    let suite = default_suite();
    let mut group = c.benchmark_group("harness");
    group.sample_size(10);
    group.bench_function("run_suite/all", |b| {
        b.iter(|| black_box(run_suite(&suite, &Dialect::ALL, COORD_TOL)))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_compile,
    bench_emit_and_parse,
    bench_solve,
    bench_harness
);
criterion_main!(benches);
