use std::sync::Arc;

use ccl_core::certify::{Certifier, SamplePlan};
use ccl_core::combing::CanonicalCombing;
use ccl_core::graph::GraphBuilder;
use ccl_core::rational::{q, qi};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn cycle_with_chords(n: usize) -> CanonicalCombing {
    let mut b = GraphBuilder::with_vertices(n);
    for i in 0..n {
        b.add_edge(i, (i + 1) % n, qi(1)).unwrap();
    }
    for i in (0..n).step_by(5) {
        b.add_edge(i, (i + n / 3) % n, q(7, 2)).unwrap();
    }
    CanonicalCombing::new(Arc::new(b.build()))
}

fn gcc_sweep(c: &mut Criterion) {
    let comb = cycle_with_chords(40);
    let core: Vec<usize> = (0..40).collect();
    let es = [qi(1), qi(2), qi(3)];
    let mut group = c.benchmark_group("gcc-sweep");
    group.sample_size(10);
    for (label, jobs) in [("sequential", 1), ("parallel", 0)] {
        let plan = SamplePlan::sampled(20_000, 1).with_jobs(jobs);
        group.bench_with_input(BenchmarkId::new(label, 40), &plan, |b, plan| {
            b.iter(|| {
                let cert = Certifier::new(&comb, core.clone(), plan.clone()).unwrap();
                black_box(cert.gcc_sweep(&es).unwrap())
            })
        });
    }
    group.finish();
}

fn consistency(c: &mut Criterion) {
    let comb = cycle_with_chords(60);
    let core: Vec<usize> = (0..60).collect();
    let mut group = c.benchmark_group("consistency");
    group.sample_size(10);
    for (label, jobs) in [("sequential", 1), ("parallel", 0)] {
        let plan = SamplePlan::exhaustive().with_jobs(jobs);
        group.bench_with_input(BenchmarkId::new(label, 60), &plan, |b, plan| {
            b.iter(|| {
                let cert = Certifier::new(&comb, core.clone(), plan.clone()).unwrap();
                black_box(cert.consistency_sweep().unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, gcc_sweep, consistency);
criterion_main!(benches);
