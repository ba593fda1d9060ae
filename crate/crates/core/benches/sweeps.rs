use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};

use gasflex::formulation::{FormulationConfig, Plane};
use gasflex::network::{load_system, IntegratedSystem};
use gasflex::solver::{HighsBackend, SolveOptions};
use gasflex::sweep::{enumerate_direction_patterns, map_sequential};

fn toy() -> IntegratedSystem {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/toy_reversal.toml");
    load_system(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn slack(planes: &[Plane], &(pm, pu): &(f64, f64)) -> f64 {
    let exact = (pm * pm - pu * pu).sqrt();
    planes
        .iter()
        .map(|p| p.eval(pm, pu) - exact)
        .fold(f64::INFINITY, f64::min)
}

fn plane_sampling(c: &mut Criterion) {
    let planes: Vec<Plane> = (0..8)
        .map(|i| Plane::at(1.0, (70.0, 20.0 + 5.0 * i as f64)).unwrap())
        .collect();
    let samples: Vec<(f64, f64)> = (0..200_000)
        .map(|i| {
            let pm = 30.0 + (i % 400) as f64 * 0.1;
            (pm, pm * ((i / 400) % 100) as f64 / 100.0)
        })
        .collect();
    let mut group = c.benchmark_group("plane sampling");
    group.bench_function("sequential", |b| {
        b.iter(|| map_sequential(black_box(&samples), |s| slack(&planes, s)))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| gasflex::sweep::map_parallel(black_box(&samples), |s| slack(&planes, s)))
    });
    group.finish();
}

fn direction_enumeration(c: &mut Criterion) {
    let sys = toy();
    let cfg = FormulationConfig::default();
    let opts = SolveOptions {
        threads: Some(1),
        ..SolveOptions::default()
    };
    let mut group = c.benchmark_group("direction enumeration");
    group.sample_size(10);
    for (label, parallel) in [("sequential", false), ("parallel", true)] {
        group.bench_function(label, |b| {
            b.iter(|| {
                enumerate_direction_patterns(&sys, &cfg, &opts, &HighsBackend, parallel).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, plane_sampling, direction_enumeration);
criterion_main!(benches);
