use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quatgraph_core::bounds::{check_endpoint_bound, random_graph};
use quatgraph_core::{
    algebra_for_ramification, build_classifying_graph, containment_locus, embed_quadratic,
    maximal_order, neighbor_orders,
};

fn maximal_orders(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximal_order");
    for q in [3u64, 13, 47] {
        let alg = algebra_for_ramification(q).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(q), &alg, |b, alg| {
            b.iter(|| maximal_order(alg).unwrap())
        });
    }
    group.finish();
}

fn tree_steps(c: &mut Criterion) {
    let o = maximal_order(&algebra_for_ramification(7).unwrap()).unwrap();
    c.bench_function("neighbors_at_2", |b| {
        b.iter(|| neighbor_orders(&o, 2).unwrap())
    });
    let u = embed_quadratic(&o, 1, 2).unwrap().unwrap();
    c.bench_function("split_locus_radius_4", |b| {
        b.iter(|| containment_locus(std::slice::from_ref(&u), &o, 2, 4).unwrap())
    });
}

fn classifying_graphs(c: &mut Criterion) {
    let mut group = c.benchmark_group("classifying_graph");
    group.sample_size(10);
    for q in [3u64, 23, 71] {
        let o = maximal_order(&algebra_for_ramification(q).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(q), &o, |b, o| {
            b.iter(|| build_classifying_graph(o, 2).unwrap())
        });
    }
    group.finish();
}

fn bound_checks(c: &mut Criterion) {
    let graphs: Vec<_> = (0..100).map(|s| random_graph(40, 3, s).unwrap()).collect();
    c.bench_function("endpoint_bound_100_graphs", |b| {
        b.iter(|| {
            graphs
                .iter()
                .map(|g| check_endpoint_bound(g).unwrap().r)
                .sum::<usize>()
        })
    });
}

criterion_group!(
    benches,
    maximal_orders,
    tree_steps,
    classifying_graphs,
    bound_checks
);
criterion_main!(benches);
