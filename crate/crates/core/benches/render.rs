use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use escape_speed::orbit::ClassifyParams;
use escape_speed::render::{render, Palette, Parallelism, RenderJob};
use escape_speed::{GrowthModel, TowerReal};
use num_complex::Complex64;

fn job(side: usize) -> RenderJob {
    RenderJob {
        model: GrowthModel::exp(),
        center: Complex64::new(5.0, 0.0),
        width: 10.0,
        height: 10.0,
        pixels_x: side,
        pixels_y: side,
        r: TowerReal::from_f64(2.0).unwrap(),
        horizon: 30,
        ceiling: escape_speed::orbit::DEFAULT_CEILING,
        classify: ClassifyParams::default(),
        palette: Palette::default(),
    }
}

fn bench_render(c: &mut Criterion) {
    let mut group = c.benchmark_group("render_exp");
    group.sample_size(10);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    for side in [32, 64] {
        let j = job(side);
        group.bench_with_input(BenchmarkId::new("sequential", side), &j, |b, j| {
            b.iter(|| render(j, Parallelism::Sequential).unwrap())
        });
        group.bench_with_input(BenchmarkId::new(format!("parallel_{cores}"), side), &j, |b, j| {
            b.iter(|| render(j, Parallelism::Threads(cores)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_render);
criterion_main!(benches);
