use std::hint::black_box;

use cotile::attractor::{attractor_hull, chaos_game, distance_field};
use cotile::centralset::{estimate_central_set, CentralSetParams};
use cotile::neighbors::enumerate_neighbors;
use cotile::render::{render_svg, Layer, LayerSource, Scene, Style};
use cotile::tiling::{cut_set, overlap_report, tiling_prefix};
use cotile::{Address, CostFunction, IfsSpec, SpecFile, TileShape};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn builtin(name: &str) -> IfsSpec {
    SpecFile::builtin(name).unwrap().to_ifs().unwrap()
}

fn box_tile(spec: &IfsSpec) -> TileShape {
    TileShape::Box(attractor_hull(spec).unwrap().bounding_box())
}

fn cut_sets(c: &mut Criterion) {
    let mut group = c.benchmark_group("cut_set");
    let golden = CostFunction::new(vec![1.0, 2.0]).unwrap();
    for budget in [8.0, 16.0, 24.0] {
        group.bench_with_input(BenchmarkId::new("golden", budget), &budget, |b, &budget| {
            b.iter(|| cut_set(&golden, black_box(budget)).unwrap())
        });
    }
    group.finish();
}

fn tilings(c: &mut Criterion) {
    let mut group = c.benchmark_group("tiling_prefix");
    let quartic = builtin("quartic");
    let one = Address::constant(1);
    for k in [7, 10, 13] {
        group.bench_with_input(BenchmarkId::new("quartic", k), &k, |b, &k| {
            b.iter(|| tiling_prefix(&quartic, quartic.cost_function(), box_tile(&quartic), &one.prefix(k)).unwrap())
        });
    }
    let sierpinski = builtin("sierpinski");
    let a: Address = "(123)".parse().unwrap();
    group.bench_function("sierpinski/4", |b| {
        b.iter(|| tiling_prefix(&sierpinski, sierpinski.cost_function(), box_tile(&sierpinski), &a.prefix(4)).unwrap())
    });
    group.finish();
}

fn attractor(c: &mut Criterion) {
    let fern = builtin("fern");
    c.bench_function("chaos_game/fern/100k", |b| {
        b.iter(|| chaos_game(&fern, 100_000, 50, black_box(1)).unwrap())
    });

    let cloud = chaos_game(&fern, 100_000, 50, 1).unwrap();
    let window = cloud.bounding_box().unwrap().scaled(1.2);
    c.bench_function("distance_field/fern/256", |b| {
        b.iter(|| distance_field(&cloud, &window, 256, 256).unwrap())
    });
}

fn neighbors(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_neighbors");
    for name in ["sierpinski", "golden"] {
        let spec = builtin(name);
        group.bench_function(BenchmarkId::new(name, 4), |b| b.iter(|| enumerate_neighbors(&spec, 4).unwrap()));
    }
    group.finish();
}

fn central_set(c: &mut Criterion) {
    let mut group = c.benchmark_group("central_set");
    group.sample_size(10);
    let spec = builtin("sierpinski");
    for grid in [128, 256] {
        let mut p = CentralSetParams::for_spec(&spec, grid).unwrap();
        p.points = 200_000;
        p.seed = 1;
        group.bench_with_input(BenchmarkId::new("sierpinski", grid), &p, |b, p| {
            b.iter(|| estimate_central_set(&spec, p).unwrap())
        });
    }
    group.finish();
}

fn overlap_and_render(c: &mut Criterion) {
    let spec = builtin("square-4map");
    let square = TileShape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let t = tiling_prefix(&spec, spec.cost_function(), square, &Address::disjunctive(4, 2).prefix(3)).unwrap();

    let mut group = c.benchmark_group("square_k3");
    group.sample_size(20);
    group.bench_function("overlap_report/512", |b| b.iter(|| overlap_report(&t, 512).unwrap()));
    let scene = Scene::fit(vec![Layer::new(LayerSource::Tiling(t.clone()), Style::default())], 1024).unwrap();
    group.bench_function("render_svg", |b| b.iter(|| render_svg(&scene).unwrap()));
    group.finish();
}

criterion_group!(benches, cut_sets, tilings, attractor, neighbors, central_set, overlap_and_render);
criterion_main!(benches);
