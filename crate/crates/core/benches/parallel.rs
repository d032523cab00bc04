//! Compares the rayon-backed enumeration kernels against their sequential
//! fallbacks. Run with `cargo bench -p zn-ci` (the `parallel` feature is
//! required so both code paths exist in one binary).

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use zn_ci::cayley::{ConnectionSet, Mode};
use zn_ci::oracle::{finite_ci_group_scan, finite_ci_group_scan_seq, FiniteAbelianGroup, ScanMode};
use zn_ci::symmetry::{set_stabilizer, set_stabilizer_seq};

fn stabilizer_fixtures() -> Vec<ConnectionSet> {
    vec![
        ConnectionSet::from_i64(&[&[1, 0], &[0, 1], &[1, 1]], 2, Mode::Undirected),
        ConnectionSet::from_i64(
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[1, 1, 0],
                &[0, 1, 1],
                &[1, 0, 1],
            ],
            3,
            Mode::Undirected,
        ),
    ]
}

fn bench_stabilizer(c: &mut Criterion) {
    let mut group = c.benchmark_group("set_stabilizer");
    for s in stabilizer_fixtures() {
        let l = s.span_lattice();
        let tag = format!("n{}_m{}", s.n(), s.len());
        group.bench_function(format!("parallel/{tag}"), |b| {
            b.iter(|| black_box(set_stabilizer(&l, &s).unwrap().order()))
        });
        group.bench_function(format!("sequential/{tag}"), |b| {
            b.iter(|| black_box(set_stabilizer_seq(&l, &s).unwrap().order()))
        });
    }
    group.finish();
}

fn bench_scan(c: &mut Criterion) {
    let z16 = FiniteAbelianGroup::cyclic(16).unwrap();
    let mut group = c.benchmark_group("finite_ci_group_scan");
    group.sample_size(10);
    group.bench_function("parallel/z16_undirected", |b| {
        b.iter(|| black_box(finite_ci_group_scan(&z16, ScanMode::Undirected).unwrap().len()))
    });
    group.bench_function("sequential/z16_undirected", |b| {
        b.iter(|| black_box(finite_ci_group_scan_seq(&z16, ScanMode::Undirected).unwrap().len()))
    });
    group.finish();
}

criterion_group!(benches, bench_stabilizer, bench_scan);
criterion_main!(benches);
