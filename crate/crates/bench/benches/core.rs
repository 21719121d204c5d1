use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use osccomp_bench::{ring, tripod_trajectory};
use osccomp_core::diagnostics::{essacc_estimate, separation_times, DEFAULT_TAU};
use osccomp_core::measures::{centroid_field, circulation, phase_measure_range, SegmentQuadrature};
use osccomp_core::{
    builtin, run, Ball, BoundingBox, Builtin, Checkpoints, Grid, RunOptions, SelectionKind,
    SelectionPolicy, StepSchedule, SubdiffDescription, DEFAULT_TOL_ACTIVE,
};

fn bench_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("run");
    let n = 100_000;
    group.throughput(Throughput::Elements(n as u64));
    let s = StepSchedule::new(0.1, 0.5, 1).unwrap();
    for b in [Builtin::Tripod, Builtin::NsBanana] {
        let f = builtin(b);
        let x0 = if b == Builtin::Tripod { [0.3, -0.7] } else { [-1.0, 1.0] };
        let s = if b == Builtin::Tripod { s } else { StepSchedule::new(0.01, 0.5, 1).unwrap() };
        for kind in [SelectionKind::FirstActive, SelectionKind::MinNorm, SelectionKind::RandomHull] {
            let policy = SelectionPolicy::new(kind, 1);
            group.bench_with_input(BenchmarkId::new(b.as_str(), kind.as_str()), &policy, |bch, &p| {
                bch.iter(|| run(f.as_ref(), &x0, s, p, n, &RunOptions::for_dimension(2)).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_min_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("min_norm");
    for k in [2, 3, 6, 12] {
        let sd = SubdiffDescription::hull(&ring(k)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &sd, |b, sd| {
            b.iter(|| black_box(sd).min_norm_element())
        });
    }
    group.finish();
}

fn bench_measures(c: &mut Criterion) {
    let n = 100_000;
    let t = tripod_trajectory(n);
    let f = builtin(Builtin::Tripod);
    let grid = Grid::new(BoundingBox::default_guard(2), 65).unwrap();
    let mut group = c.benchmark_group("measures");
    group.throughput(Throughput::Elements(n as u64));
    group.bench_function("centroid_field", |b| {
        b.iter(|| {
            let mu = phase_measure_range(&t, 0, n).unwrap();
            centroid_field(&mu, &grid).unwrap()
        })
    });
    group.bench_function("circulation_exact", |b| {
        b.iter(|| {
            circulation(
                f.as_ref(),
                &t,
                n,
                SelectionPolicy::default(),
                SegmentQuadrature::Exact,
                DEFAULT_TOL_ACTIVE,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn bench_diagnostics(c: &mut Criterion) {
    let n = 100_000;
    let t = tripod_trajectory(n);
    let f = builtin(Builtin::Tripod);
    let grid = Grid::new(BoundingBox::default_guard(2), 65).unwrap();
    let cps = Checkpoints::geometric(n);
    let mut group = c.benchmark_group("diagnostics");
    group.throughput(Throughput::Elements(n as u64));
    group.bench_function("essacc", |b| {
        b.iter(|| essacc_estimate(&t, &grid, &cps, DEFAULT_TAU, Some((f.as_ref(), 1e-2))).unwrap())
    });
    let from = Ball::new(vec![0.01, 0.0], 0.005).unwrap();
    let to = Ball::new(vec![-0.01, 0.0], 0.005).unwrap();
    group.bench_function("separation_times", |b| {
        b.iter(|| separation_times(&t, &from, &to, cps.as_slice()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_run, bench_min_norm, bench_measures, bench_diagnostics);
criterion_main!(benches);
