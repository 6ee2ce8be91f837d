//! Scenario builders shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secmanet::attacks::{AttackBehavior, AttackKind};
use secmanet::kernel::Adjacency;
use secmanet::scenario::{Placement, ScenarioConfig};
use secmanet::transport::{FlowSpec, TrafficKind};
use secmanet::{NodeId, SimTime};

pub fn static_config(points: &[(f64, f64)], range: f64, arena: (f64, f64)) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(points.len());
    c.arena.width = arena.0;
    c.arena.height = arena.1;
    c.radio.range = range;
    c.mobility.min_speed = 0.0;
    c.mobility.max_speed = 0.0;
    c.placements = points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Placement {
            node: NodeId(i as u32),
            x,
            y,
        })
        .collect();
    c
}

pub fn streaming(src: u32, dst: u32, start_s: u64, rate: u64) -> FlowSpec {
    FlowSpec {
        src: NodeId(src),
        dst: NodeId(dst),
        start: SimTime::from_secs(start_s),
        kind: TrafficKind::Streaming,
        bytes_total: 0,
        rate,
    }
}

pub fn bulk(src: u32, dst: u32, start_s: u64, bytes: u64) -> FlowSpec {
    FlowSpec {
        src: NodeId(src),
        dst: NodeId(dst),
        start: SimTime::from_secs(start_s),
        kind: TrafficKind::Bulk,
        bytes_total: bytes,
        rate: 0,
    }
}

pub fn attack(node: u32, kind: AttackKind) -> AttackBehavior {
    AttackBehavior {
        node: NodeId(node),
        kind,
        active_from: SimTime::ZERO,
        active_to: SimTime::MAX,
        target: None,
    }
}

/// A(0) at the west, X(1) north, Y(2) south, D(3) east. A and D are two
/// hops apart over two disjoint relays.
pub const DIAMOND: [(f64, f64); 4] = [(0.0, 100.0), (100.0, 0.0), (100.0, 200.0), (200.0, 100.0)];

/// Diamond with a 12 kB/s stream from A to D starting at 10 s, run for 30 s.
pub fn diamond(seed: u64) -> ScenarioConfig {
    let mut c = static_config(&DIAMOND, 150.0, (200.0, 200.0));
    c.seed = seed;
    c.duration = SimTime::from_secs(30);
    c.flows.push(streaming(0, 3, 10, 12_000));
    c
}

/// Two 12-node grid clusters joined only through node 12. Positions are
/// jittered per seed by up to 10 m, which keeps every in-cluster link and
/// keeps the clusters out of each other's range.
pub fn bridged_clusters(seed: u64) -> ScenarioConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb51d);
    let mut jitter = |v: f64| v + rng.gen_range(-10.0..=10.0);
    let mut pts = Vec::with_capacity(25);
    for base_x in [60.0, 440.0] {
        for col in 0..3 {
            for row in 0..4 {
                pts.push((
                    jitter(base_x + 70.0 * col as f64),
                    jitter(40.0 + 70.0 * row as f64),
                ));
            }
        }
    }
    // Cluster A occupies ids 0..12, cluster B ids 13..25; the bridge is 12.
    pts.insert(12, (320.0, 145.0));
    let mut c = static_config(&pts, 150.0, (700.0, 320.0));
    c.seed = seed;
    c.duration = SimTime::from_secs(40);
    c.flows.push(streaming(0, 24, 15, 6_000));
    c.flows.push(streaming(5, 19, 15, 6_000));
    c.flows.push(streaming(20, 3, 15, 6_000));
    c
}

/// 25 nodes placed uniformly at random (per seed) in a 600 m square with a
/// 250 m range. Returns `None` when the placement is disconnected.
pub fn random25(seed: u64) -> Option<ScenarioConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9) ^ 0x25);
    let pts: Vec<(f64, f64)> = (0..25)
        .map(|_| (rng.gen_range(0.0..=600.0), rng.gen_range(0.0..=600.0)))
        .collect();
    let adj = unit_disk(&pts, 250.0);
    if !connected(&adj, &BTreeSet::new()) {
        return None;
    }
    let mut c = static_config(&pts, 250.0, (600.0, 600.0));
    c.seed = seed;
    c.duration = SimTime::from_secs(30);
    Some(c)
}

/// First connected random 25-node placement at or after `seed`.
pub fn random25_connected(seed: u64) -> ScenarioConfig {
    (0..)
        .find_map(|k| random25(seed + 1000 * k))
        .map(|mut c| {
            c.seed = seed;
            c
        })
        .expect("some placement connects")
}

pub fn unit_disk(pts: &[(f64, f64)], range: f64) -> Adjacency {
    let mut adj = Adjacency::empty(pts.len());
    for a in 0..pts.len() {
        for b in (a + 1)..pts.len() {
            let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
            if (dx * dx + dy * dy).sqrt() <= range {
                adj.link(NodeId(a as u32), NodeId(b as u32));
            }
        }
    }
    adj
}

/// Plain BFS hop counts from `src`, never entering `removed`.
pub fn bfs(adj: &Adjacency, src: NodeId, removed: &BTreeSet<NodeId>) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[src.index()] = Some(0);
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        let d = dist[u.index()].expect("queued nodes have a distance");
        for &v in adj.neighbors(u) {
            if dist[v.index()].is_none() && !removed.contains(&v) {
                dist[v.index()] = Some(d + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

pub fn connected(adj: &Adjacency, removed: &BTreeSet<NodeId>) -> bool {
    let Some(start) = (0..adj.len() as u32)
        .map(NodeId)
        .find(|n| !removed.contains(n))
    else {
        return true;
    };
    bfs(adj, start, removed)
        .iter()
        .enumerate()
        .all(|(i, d)| d.is_some() || removed.contains(&NodeId(i as u32)))
}
