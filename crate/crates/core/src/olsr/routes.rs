use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::NodeId;

/// Undirected graph as sorted neighbor sets.
pub type Graph = BTreeMap<NodeId, BTreeSet<NodeId>>;

pub fn add_edge(g: &mut Graph, a: NodeId, b: NodeId) {
    if a != b {
        g.entry(a).or_default().insert(b);
        g.entry(b).or_default().insert(a);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub next_hop: NodeId,
    pub hop_count: u32,
    /// Hops after the source, ending with the destination.
    pub path: Vec<NodeId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingTable {
    routes: BTreeMap<NodeId, Route>,
}

impl RoutingTable {
    pub fn get(&self, dst: NodeId) -> Option<&Route> {
        self.routes.get(&dst)
    }

    pub fn next_hop(&self, dst: NodeId) -> Option<NodeId> {
        self.routes.get(&dst).map(|r| r.next_hop)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, &Route)> {
        self.routes.iter()
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    /// True if `node` is a destination or lies on any stored path.
    pub fn mentions(&self, node: NodeId) -> bool {
        self.routes
            .iter()
            .any(|(d, r)| *d == node || r.path.contains(&node))
    }
}

/// Minimum-hop paths from `source`, skipping `excluded` nodes entirely.
///
/// Equal-length paths are ordered lexicographically by their hop sequence,
/// so the lowest next hop wins first and then the lowest intermediates.
/// BFS is run layer by layer with each layer kept in that lexicographic
/// order; a node's predecessor is the first node of the previous layer that
/// reaches it.
pub fn shortest_paths(source: NodeId, graph: &Graph, excluded: &BTreeSet<NodeId>) -> RoutingTable {
    let mut visited: BTreeSet<NodeId> = BTreeSet::from([source]);
    let mut paths: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::from([(source, Vec::new())]);
    let mut layer = vec![source];
    let mut table = RoutingTable::default();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for u in &layer {
            let Some(nbrs) = graph.get(u) else { continue };
            for &v in nbrs {
                if excluded.contains(&v) || !visited.insert(v) {
                    continue;
                }
                let mut p = paths[u].clone();
                p.push(v);
                table.routes.insert(
                    v,
                    Route {
                        next_hop: p[0],
                        hop_count: p.len() as u32,
                        path: p.clone(),
                    },
                );
                paths.insert(v, p);
                next.push(v);
            }
        }
        layer = next;
    }
    table
}
