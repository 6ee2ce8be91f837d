use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secmanet::kernel::Adjacency;
use secmanet::olsr::flood::{flood_static, FloodMode};
use secmanet::scenario::{Placement, ScenarioConfig};
use secmanet::sweep::{batch_map, batch_map_sequential, run_seeds, run_seeds_sequential};
use secmanet::transport::{FlowSpec, TrafficKind};
use secmanet::{NodeId, SimTime};

fn grid_scenario() -> ScenarioConfig {
    let mut c = ScenarioConfig::new(9);
    c.duration = SimTime::from_secs(12);
    c.radio.range = 110.0;
    c.placements = (0..9)
        .map(|i| Placement {
            node: NodeId(i),
            x: 50.0 + 100.0 * (i % 3) as f64,
            y: 50.0 + 100.0 * (i / 3) as f64,
        })
        .collect();
    c.flows.push(FlowSpec {
        src: NodeId(0),
        dst: NodeId(8),
        start: SimTime::from_secs(6),
        kind: TrafficKind::Bulk,
        bytes_total: 24_000,
        rate: 0,
    });
    c
}

fn random_topologies(count: usize) -> Vec<Adjacency> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(10..30);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    if rng.gen_bool(0.2) {
                        edges.push((a, b));
                    }
                }
            }
            Adjacency::from_edges(n as usize, edges)
        })
        .collect()
}

fn flood_cost(adj: &Adjacency) -> usize {
    flood_static(adj, NodeId(0), FloodMode::Mpr).retransmissions
}

fn bench_sweep(c: &mut Criterion) {
    let cfg = grid_scenario();
    let seeds: Vec<u64> = (1..=8).collect();
    let mut g = c.benchmark_group("seed_sweep");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| run_seeds(black_box(&cfg), &seeds).unwrap())
    });
    g.bench_function("sequential", |b| {
        b.iter(|| run_seeds_sequential(black_box(&cfg), &seeds).unwrap())
    });
    g.finish();

    let topologies = random_topologies(64);
    let mut g = c.benchmark_group("mpr_flooding_batch");
    g.bench_function("parallel", |b| {
        b.iter(|| batch_map(black_box(&topologies), flood_cost))
    });
    g.bench_function("sequential", |b| {
        b.iter(|| batch_map_sequential(black_box(&topologies), flood_cost))
    });
    g.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
