use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::mobility::{Arena, NodePosition};
use crate::{NodeId, SimTime};

/// Unit-disk, loss-free, contention-free radio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkModel {
    /// meters
    pub radio_range: f64,
    pub per_hop_delay: SimTime,
    pub arena: Arena,
}

/// Symmetric, irreflexive adjacency indexed by node.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Adjacency {
    neighbors: Vec<BTreeSet<NodeId>>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Adjacency {
            neighbors: vec![BTreeSet::new(); n],
        }
    }

    /// Builds an adjacency from an undirected edge list; self-loops are ignored.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut adj = Self::empty(n);
        for (a, b) in edges {
            adj.link(NodeId(a), NodeId(b));
        }
        adj
    }

    pub fn link(&mut self, a: NodeId, b: NodeId) {
        if a != b {
            self.neighbors[a.index()].insert(b);
            self.neighbors[b.index()].insert(a);
        }
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn linked(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors
            .get(a.index())
            .is_some_and(|s| s.contains(&b))
    }

    pub fn neighbors(&self, a: NodeId) -> &BTreeSet<NodeId> {
        &self.neighbors[a.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(i, s)| {
            let a = NodeId(i as u32);
            s.iter().filter(move |&&b| a < b).map(move |&b| (a, b))
        })
    }

    pub fn mean_degree(&self) -> f64 {
        if self.neighbors.is_empty() {
            return 0.0;
        }
        let total: usize = self.neighbors.iter().map(BTreeSet::len).sum();
        total as f64 / self.neighbors.len() as f64
    }

    /// True when every node reaches every other node.
    pub fn is_connected(&self) -> bool {
        let n = self.neighbors.len();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in &self.neighbors[u] {
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    stack.push(v.index());
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Copy of this graph with `removed` isolated.
    pub fn without(&self, removed: NodeId) -> Adjacency {
        let mut out = self.clone();
        for s in &mut out.neighbors {
            s.remove(&removed);
        }
        out.neighbors[removed.index()].clear();
        out
    }
}

/// Links every pair within radio range; `distance == range` counts as linked.
pub fn neighbors_at(positions: &[NodePosition], model: &LinkModel) -> Adjacency {
    let mut adj = Adjacency::empty(positions.len());
    for (i, a) in positions.iter().enumerate() {
        for (j, b) in positions.iter().enumerate().skip(i + 1) {
            if a.distance_to(b) <= model.radio_range {
                adj.link(NodeId(i as u32), NodeId(j as u32));
            }
        }
    }
    adj
}
