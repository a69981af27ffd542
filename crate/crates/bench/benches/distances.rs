use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use exotic_bench::{cobweb, pairs, tower, zcon};
use exotic_core::cobweb::oracle;

const PAIRS: usize = 256;

fn cobweb_distance(c: &mut Criterion) {
    let mut group = c.benchmark_group("cw_distance");
    for n in [8, 64] {
        let space = cobweb(n);
        let points = pairs(&space, PAIRS, 1);
        group.bench_with_input(BenchmarkId::new("closed_form", n), &points, |b, points| {
            b.iter(|| {
                for (p, q) in points {
                    std::hint::black_box(space.cw_distance(p, q).unwrap());
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("shortest_path", n), &points, |b, points| {
            b.iter(|| {
                for (p, q) in points {
                    std::hint::black_box(oracle::shortest_path(space.eps(), space.vortices(), p, q).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn zcon_distance(c: &mut Criterion) {
    let z = zcon();
    let points = pairs(&z, PAIRS, 2);
    c.bench_function("z_distance", |b| {
        b.iter(|| {
            for (p, q) in &points {
                std::hint::black_box(z.z_distance(p, q));
            }
        })
    });
}

fn limit_distance(c: &mut Criterion) {
    let mut group = c.benchmark_group("limit_distance");
    for height in [2, 4] {
        let t = tower(height);
        let points = pairs(&t, PAIRS, 3);
        group.bench_with_input(BenchmarkId::from_parameter(height), &points, |b, points| {
            b.iter(|| {
                for (x, u) in points {
                    std::hint::black_box(t.limit_distance(x, u));
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, cobweb_distance, zcon_distance, limit_distance);
criterion_main!(benches);
