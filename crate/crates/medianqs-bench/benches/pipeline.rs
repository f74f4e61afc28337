//! Per-stage and end-to-end benchmarks: triangulation, partition, contour
//! tree, the full quasi-state computation, and the transport distance.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use medianqs::median::largest_odd_k;
use medianqs::partition::build_partition;
use medianqs::reeb::build_reeb;
use medianqs::sphere::{rotation_from_seed, UnitPoint};
use medianqs::triangulation::build_triangulation;
use medianqs::wasserstein::{w_one, DiscreteMeasure};
use medianqs::{InputFunction, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rotated_z() -> InputFunction {
    let rot = rotation_from_seed(2);
    match InputFunction::builtin("z").expect("known builtin") {
        InputFunction::Polynomial(p) => InputFunction::Polynomial(p.rotate(&rot)),
        InputFunction::VertexTable(_) => unreachable!("builtins are polynomials"),
    }
}

fn random_measure(rng: &mut ChaCha8Rng, atoms: usize) -> DiscreteMeasure {
    let ints: Vec<u64> = (0..atoms).map(|_| rng.gen_range(1..=9)).collect();
    let total: u64 = ints.iter().sum();
    let entries = ints
        .into_iter()
        .map(|w| {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let p = UnitPoint::from_spherical(z.acos(), phi).expect("valid coordinates");
            (p, w as f64 / total as f64)
        })
        .collect();
    DiscreteMeasure::new(entries).expect("random atoms are distinct")
}

fn bench_triangulation(c: &mut Criterion) {
    c.bench_function("triangulation/N=46", |b| {
        b.iter(|| build_triangulation(black_box(46)).unwrap())
    });
}

fn bench_partition(c: &mut Criterion) {
    c.bench_function("partition/k=979", |b| {
        b.iter(|| build_partition(black_box(979)).unwrap())
    });
}

fn bench_reeb(c: &mut Criterion) {
    let tri = build_triangulation(46).unwrap();
    let field = ScalarField::sample(&tri, &rotated_z()).unwrap();
    c.bench_function("reeb/N=46", |b| b.iter(|| build_reeb(black_box(&field)).unwrap()));
}

fn bench_compute(c: &mut Criterion) {
    let f = rotated_z();
    let k = largest_odd_k(46);
    c.bench_function("compute/N=46", |b| {
        b.iter(|| medianqs::compute(black_box(&f), 46, k).unwrap())
    });
}

fn bench_w_one(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mu = random_measure(&mut rng, 30);
    let nu = random_measure(&mut rng, 30);
    c.bench_function("w_one/30x30", |b| {
        b.iter(|| w_one(black_box(&mu), black_box(&nu)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_triangulation,
    bench_partition,
    bench_reeb,
    bench_compute,
    bench_w_one
);
criterion_main!(benches);
