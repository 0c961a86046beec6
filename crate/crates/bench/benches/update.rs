use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dtml_bench::{action, kdl, model};
use dtml_core::action::product_update;
use dtml_core::hybrid::tml_image;
use dtml_core::kdl::{Compiler, DEFAULT_EVENT_CAP};
use dtml_core::random::random_closed_formula;
use dtml_core::{ActionRegistry, Checker};

fn product(c: &mut Criterion) {
    let mut group = c.benchmark_group("product_update");
    let registry = ActionRegistry::new();
    for (agents, worlds) in [(3, 4), (4, 8), (5, 16)] {
        let m = model(7, agents, worlds);
        let d = action(&m);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{agents}x{worlds}")), &m, |b, m| {
            b.iter(|| product_update(black_box(m), &d, &registry).unwrap())
        });
    }
    group.finish();
}

fn check(c: &mut Criterion) {
    let m = model(11, 4, 8);
    let registry = ActionRegistry::new();
    let checker = Checker::new(m.clone(), &registry);
    let mut rng = dtml_bench::rng(11);
    let corpus: Vec<_> = (0..32).map(|_| random_closed_formula(&mut rng, &m.signature, 4)).collect();
    c.bench_function("check_32_formulas_4x8", |b| {
        b.iter(|| {
            corpus
                .iter()
                .filter(|phi| checker.holds(0, phi).unwrap())
                .count()
        })
    });
}

fn compile(c: &mut Criterion) {
    let (m, updates) = kdl(3);
    c.bench_function("compile_learning", |b| {
        b.iter(|| {
            let mut compiler = Compiler::new(black_box(&m), &updates, DEFAULT_EVENT_CAP).unwrap();
            compiler.compile("l").unwrap()
        })
    });
    c.bench_function("compiled_product", |b| {
        let mut compiler = Compiler::new(&m, &updates, DEFAULT_EVENT_CAP).unwrap();
        let delta = compiler.compile("l").unwrap();
        let registry = compiler.into_registry();
        let image = tml_image(&m.to_hybrid()).unwrap();
        b.iter(|| product_update(black_box(&image), &delta, &registry).unwrap())
    });
}

criterion_group!(benches, product, check, compile);
criterion_main!(benches);
