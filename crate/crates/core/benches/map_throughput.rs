use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use behavior_atlas::atlas::{compute_behavior_map_with, Execution, GridSpec, MapOptions};
use behavior_atlas::world::{build_world, WorldKind, WorldParams};

fn map_throughput(c: &mut Criterion) {
    let mut group = c.benchmark_group("behavior_map_31x31");
    group.sample_size(10);
    let spec = GridSpec::square(31).unwrap();
    let modes = [
        ("serial", Execution::Serial),
        #[cfg(feature = "parallel")]
        ("parallel", Execution::Parallel),
    ];
    for kind in [WorldKind::BigSmall, WorldKind::Cliff, WorldKind::Cafe] {
        let w = build_world(kind, &WorldParams::defaults(kind)).unwrap();
        for &(name, execution) in &modes {
            let opts = MapOptions {
                execution,
                ..MapOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(name, kind), &opts, |b, opts| {
                b.iter(|| compute_behavior_map_with(black_box(&w), &spec, opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, map_throughput);
criterion_main!(benches);
