use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use roa_bench::{duffing, reference_config};
use roa_core::rng::{stream, Stream};
use roa_core::{
    generate_directions, grid_classify, learn, rk4_step, sample_trajectory, ApproxSet, CenterSpec,
    Family, GridSpec, IntegratorConfig, PolytopeSet, Region,
};

fn integrate(c: &mut Criterion) {
    let field = duffing();
    let cfg = IntegratorConfig::default();
    c.bench_function("rk4_step", |b| {
        b.iter(|| rk4_step(&field, black_box(&[1.0, -0.5]), 0.05))
    });
    c.bench_function("sample_trajectory k=50 never returns", |b| {
        b.iter(|| sample_trajectory(&field, black_box(&[1.0, -0.5]), 50, &cfg, |_| false))
    });
}

fn sets(c: &mut Criterion) {
    let net = Arc::new(generate_directions(200, 2, &mut stream(1, Stream::Directions)));
    let poly = ApproxSet::Polytope(PolytopeSet::new(vec![0.0, 0.0], net, 3.0));
    c.bench_function("polytope n=200 contains", |b| {
        b.iter(|| poly.contains(black_box(&[0.7, -1.1])))
    });
    c.bench_function("polytope n=200 update", |b| {
        let mut rng = stream(1, Stream::Sampling);
        b.iter(|| poly.update(black_box(&[0.7, -1.1]), 0.1, &mut rng).unwrap())
    });
    c.bench_function("polytope n=200 sample_uniform", |b| {
        let mut rng = stream(1, Stream::Sampling);
        b.iter(|| poly.sample_uniform(&mut rng).unwrap())
    });
}

fn learning(c: &mut Criterion) {
    let field = duffing();
    let mut group = c.benchmark_group("learn");
    group.sample_size(10);
    let configs = [
        ("sphere", reference_config(Family::Sphere, 1)),
        ("polytope n=200", reference_config(Family::Polytope { directions: 200 }, 1)),
        ("10 polytopes", {
            let mut cfg = reference_config(Family::Polytope { directions: 200 }, 1);
            cfg.centers = CenterSpec::Random {
                count: 10,
                lo: -3.0,
                hi: 3.0,
            };
            cfg
        }),
    ];
    for (name, cfg) in configs {
        group.bench_function(name, |b| {
            b.iter_batched(|| cfg.clone(), |cfg| learn(&cfg, &field).unwrap(), BatchSize::SmallInput)
        });
    }
    group.finish();
}

fn grid(c: &mut Criterion) {
    let field = duffing();
    let spec = GridSpec {
        resolution: 25,
        ..GridSpec::planar_default()
    };
    let mut group = c.benchmark_group("grid");
    group.sample_size(10);
    group.bench_function("25x25 T=30", |b| {
        b.iter(|| grid_classify(&field, &spec, &IntegratorConfig::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, integrate, sets, learning, grid);
criterion_main!(benches);
