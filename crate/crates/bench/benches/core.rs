use criterion::{black_box, criterion_group, criterion_main, Criterion};

use equibs_core::canonical::{canonical_code, root_restrict};
use equibs_core::generators::{prism_rotation, sierpinski};
use equibs_core::measure::{empirical_measure, rooted_ball};
use equibs_core::spectra::{moment, multiplicity};

fn canonical(c: &mut Criterion) {
    let t3 = sierpinski(3).unwrap();
    let ball = rooted_ball(&t3, 0, 3).unwrap();
    c.bench_function("canonical_code/T3 ball r=3", |b| b.iter(|| canonical_code(black_box(&ball)).unwrap()));
    let prism = root_restrict(&prism_rotation(6).unwrap(), 0).unwrap();
    c.bench_function("canonical_code/prism 6", |b| b.iter(|| canonical_code(black_box(&prism)).unwrap()));
}

fn spectra(c: &mut Criterion) {
    let t4 = sierpinski(4).unwrap();
    c.bench_function("multiplicity/T4 n=1 rho=1", |b| b.iter(|| multiplicity(black_box(&t4), 1, 1).unwrap()));
    c.bench_function("moment/T4 n=1 rho=1 r=4", |b| b.iter(|| moment(black_box(&t4), 1, 1, 4).unwrap()));
}

fn measures(c: &mut Criterion) {
    let t4 = sierpinski(4).unwrap();
    let mut group = c.benchmark_group("empirical_measure");
    group.sample_size(20);
    group.bench_function("T4 r=2", |b| b.iter(|| empirical_measure(black_box(&t4), 2).unwrap()));
    group.finish();
}

criterion_group!(benches, canonical, spectra, measures);
criterion_main!(benches);
