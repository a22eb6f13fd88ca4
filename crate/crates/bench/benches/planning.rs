use cnnpart_bench::{quick_ga, vgg16};
use cnnpart_core::synthetic::random_instance;
use cnnpart_core::{
    energy_data, estimate, exhaustive_vertical, make_plan, plan_data, plan_sequential_dp, plan_sequential_ga,
    plan_vertical_ga, SearchMethod, Strategy,
};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn analytical(c: &mut Criterion) {
    let (model, profile) = vgg16();
    let mut group = c.benchmark_group("estimate_vgg16");
    for m in [2, 4, 8] {
        let data = plan_data(&model, m).unwrap();
        group.bench_with_input(BenchmarkId::new("data", m), &data, |b, plan| {
            b.iter(|| energy_data(&model, &profile, black_box(plan)).unwrap())
        });
        let vertical = make_plan(&model, &profile, Strategy::Vertical, m, &SearchMethod::Genetic(quick_ga(0))).unwrap();
        group.bench_with_input(BenchmarkId::new("vertical", m), &vertical.plan, |b, plan| {
            b.iter(|| estimate(&model, &profile, black_box(plan)).unwrap())
        });
    }
    group.finish();
}

fn planners(c: &mut Criterion) {
    let (model, profile) = vgg16();
    let mut group = c.benchmark_group("planners_vgg16");
    group.sample_size(10);
    for m in [2, 4] {
        group.bench_function(BenchmarkId::new("sequential_dp", m), |b| {
            b.iter(|| plan_sequential_dp(&model, &profile, black_box(m)).unwrap())
        });
        group.bench_function(BenchmarkId::new("sequential_ga", m), |b| {
            b.iter(|| plan_sequential_ga(&model, &profile, black_box(m), &quick_ga(1)).unwrap())
        });
        group.bench_function(BenchmarkId::new("vertical_ga", m), |b| {
            b.iter(|| plan_vertical_ga(&model, &profile, black_box(m), &quick_ga(1)).unwrap())
        });
    }
    group.finish();

    let (small, small_profile) = random_instance(3, 8);
    c.bench_function("exhaustive_vertical_8x3", |b| {
        b.iter(|| exhaustive_vertical(&small, &small_profile, black_box(3)).unwrap())
    });
}

criterion_group!(benches, analytical, planners);
criterion_main!(benches);
