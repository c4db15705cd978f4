use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gcr_core::construct::{build_surface, Cone, ProfileU};
use gcr_core::curves::builtin;
use gcr_core::geometry::JetConfig;
use gcr_core::verifier::{full_report, Grid};
use gcr_core::{Execution, Interval, VerifyOptions};

fn sweep(c: &mut Criterion) {
    let surf = build_surface(
        Cone::TimeLikeCone,
        ProfileU::PowerLog { a: 2.0, b: 0.0 },
        builtin::hyperbola(),
        Interval::new(0.5, 2.0),
        Interval::new(-1.0, 1.0),
    )
    .expect("valid surface");
    let mut group = c.benchmark_group("full_report");
    group.sample_size(10);
    for n in [21usize, 41, 81] {
        let grid = Grid::for_surface(&surf, n, n);
        for (label, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            let opts = VerifyOptions { jet: JetConfig::fd(1e-4), execution, ..VerifyOptions::default() };
            group.bench_with_input(BenchmarkId::new(label, format!("{n}x{n}")), &grid, |b, grid| {
                b.iter(|| full_report(&surf, grid, &opts))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
