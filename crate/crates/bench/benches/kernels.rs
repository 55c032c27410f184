use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dyadic_core::bellman::{verify_certificate, BellmanFunction};
use dyadic_core::lab::{CheckId, CheckInputs, InequalityLab};
use dyadic_core::paraproduct::{weighted_operator_norm, ParaproductOperator, PowerIteration};
use dyadic_core::weights::{a2_characteristic, gen_bmo_symbol, gen_cascade_weight, gen_power_weight, squared_coefficients};
use dyadic_core::{haar_analyze, haar_synthesize, SuiteConstants, SymbolKind};

fn haar(c: &mut Criterion) {
    let mut group = c.benchmark_group("haar");
    for depth in [10u32, 14, 18] {
        let f = gen_bmo_symbol(SymbolKind::RandomNormalized, depth, 1).unwrap();
        group.bench_with_input(BenchmarkId::new("analyze", depth), &f, |b, f| b.iter(|| haar_analyze(black_box(f))));
        let s = haar_analyze(&f);
        group.bench_with_input(BenchmarkId::new("synthesize", depth), &s, |b, s| {
            b.iter(|| haar_synthesize(black_box(s)))
        });
    }
    group.finish();
}

fn paraproduct(c: &mut Criterion) {
    let mut group = c.benchmark_group("paraproduct");
    for depth in [10u32, 14] {
        let op = ParaproductOperator::new(gen_bmo_symbol(SymbolKind::RandomNormalized, depth, 2).unwrap());
        let f = gen_bmo_symbol(SymbolKind::RandomNormalized, depth, 3).unwrap();
        group.bench_with_input(BenchmarkId::new("apply", depth), &f, |b, f| b.iter(|| op.apply(black_box(f)).unwrap()));
    }
    group.sample_size(10);
    let opts = PowerIteration::default();
    for depth in [8u32, 10] {
        let b = gen_bmo_symbol(SymbolKind::DyadicLog, depth, 0).unwrap();
        let w = gen_power_weight(-0.8, depth).unwrap();
        group.bench_function(BenchmarkId::new("weighted_norm", depth), |bench| {
            bench.iter(|| weighted_operator_norm(black_box(&b), black_box(&w), &opts).unwrap())
        });
    }
    group.finish();
}

fn weights(c: &mut Criterion) {
    let w = gen_cascade_weight(14, 0.9, 5).unwrap();
    c.bench_function("a2_characteristic/14", |b| b.iter(|| a2_characteristic(black_box(&w))));
}

fn checks(c: &mut Criterion) {
    let depth = 12;
    let w = gen_cascade_weight(depth, 0.9, 7).unwrap();
    let b = gen_bmo_symbol(SymbolKind::RandomNormalized, depth, 8).unwrap();
    let lam = squared_coefficients(&haar_analyze(&b));
    let inputs = CheckInputs::weight(&w).with_symbol(&b).with_carleson(&lam);
    let lab = InequalityLab::default();
    let mut group = c.benchmark_group("check_profile");
    for id in [CheckId::Prop1, CheckId::Prop2, CheckId::Embed, CheckId::BilinearProduct] {
        group.bench_function(id.as_str(), |bench| bench.iter(|| lab.profile(id, black_box(&inputs)).unwrap()));
    }
    group.finish();
}

fn certificates(c: &mut Criterion) {
    let constants = SuiteConstants::frozen().bellman;
    let mut group = c.benchmark_group("certificate");
    group.sample_size(10);
    for f in [BellmanFunction::B1, BellmanFunction::B2, BellmanFunction::B3] {
        group.bench_function(f.id(), |b| b.iter(|| verify_certificate(f, 2000, 1, &constants).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, haar, paraproduct, weights, checks, certificates);
criterion_main!(benches);
