use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::olsr::{shortest_paths, NodeState};
use crate::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelayPlan {
    pub primary_next_hop: NodeId,
    pub primary_path: Vec<NodeId>,
    pub alternate_relay: Option<NodeId>,
    /// Explicit hops of the alternate copy, starting at the relay and ending
    /// at the destination. Empty without a relay.
    pub alternate_path: Vec<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RelayError {
    #[error("no route to {0}")]
    NoRoute(NodeId),
}

/// Picks the primary next hop from the routing table and the lowest-id
/// relay whose path to `dst` avoids every intermediate of the primary path.
/// MPR members are tried first, then the remaining symmetric neighbors.
pub fn plan_relay(state: &NodeState, dst: NodeId) -> Result<RelayPlan, RelayError> {
    let route = state.routes().get(dst).ok_or(RelayError::NoRoute(dst))?;
    let primary_inner: BTreeSet<NodeId> =
        route.path[..route.path.len() - 1].iter().copied().collect();

    let mprs = &state.mpr_set().members;
    let others = state
        .symmetric_neighbors()
        .into_iter()
        .filter(|n| !mprs.contains(n));
    let candidates = mprs.iter().copied().chain(others).filter(|m| {
        *m != route.next_hop && *m != dst && !primary_inner.contains(m) && !state.is_blacklisted(*m)
    });

    let graph = state.known_graph();
    let mut excluded: BTreeSet<NodeId> = state.blacklist().keys().copied().collect();
    excluded.insert(state.id);
    excluded.extend(primary_inner.iter().copied());

    for m in candidates {
        let table = shortest_paths(m, &graph, &excluded);
        if let Some(r) = table.get(dst) {
            let mut path = vec![m];
            path.extend(r.path.iter().copied());
            return Ok(RelayPlan {
                primary_next_hop: route.next_hop,
                primary_path: route.path.clone(),
                alternate_relay: Some(m),
                alternate_path: path,
            });
        }
    }
    Ok(RelayPlan {
        primary_next_hop: route.next_hop,
        primary_path: route.path.clone(),
        alternate_relay: None,
        alternate_path: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Adjacency;
    use crate::olsr::flood::converge;
    use crate::olsr::OlsrConfig;
    use crate::SimTime;

    fn converged(n: usize, edges: &[(u32, u32)]) -> Vec<NodeState> {
        let adj = Adjacency::from_edges(n, edges.iter().copied());
        converge(&adj, OlsrConfig::default())
    }

    // A=0, X=1, Y=2, D=3
    #[test]
    fn diamond_uses_other_relay() {
        let mut states = converged(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let a = &mut states[0];
        assert_eq!(a.routes().next_hop(NodeId(3)), Some(NodeId(1)));
        let plan = plan_relay(a, NodeId(3)).unwrap();
        assert_eq!(plan.primary_next_hop, NodeId(1));
        assert_eq!(plan.alternate_relay, Some(NodeId(2)));
        assert_eq!(plan.alternate_path, vec![NodeId(2), NodeId(3)]);
    }

    #[test]
    fn diamond_with_both_mprs() {
        // MPR(A) = {X, Y} when X and Y each reach a private 2-hop node too.
        // A=0, X=1, Y=2, D=3, P=4, Q=5
        let states = converged(6, &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 5)]);
        let a = &states[0];
        assert_eq!(a.mpr_set().members, BTreeSet::from([NodeId(1), NodeId(2)]));
        let plan = plan_relay(a, NodeId(3)).unwrap();
        assert_eq!(plan.alternate_relay, Some(NodeId(2)));
    }

    #[test]
    fn chain_has_no_alternate() {
        let states = converged(3, &[(0, 1), (1, 2)]);
        let plan = plan_relay(&states[0], NodeId(2)).unwrap();
        assert_eq!(plan.primary_next_hop, NodeId(1));
        assert_eq!(plan.alternate_relay, None);
    }

    #[test]
    fn lowest_disjoint_relay_wins() {
        // 0 reaches 5 via 1 (primary), 2 or 3 (both disjoint).
        let states = converged(6, &[(0, 1), (0, 2), (0, 3), (1, 5), (2, 5), (3, 5)]);
        let plan = plan_relay(&states[0], NodeId(5)).unwrap();
        assert_eq!(plan.primary_next_hop, NodeId(1));
        assert_eq!(plan.alternate_relay, Some(NodeId(2)));
    }

    #[test]
    fn no_route_is_error() {
        let states = converged(3, &[(0, 1)]);
        assert_eq!(
            plan_relay(&states[0], NodeId(2)),
            Err(RelayError::NoRoute(NodeId(2)))
        );
    }

    #[test]
    fn blacklisted_neighbor_never_relays() {
        let mut states = converged(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let a = &mut states[0];
        a.add_to_blacklist(
            NodeId(2),
            crate::olsr::BlacklistReason::HoneypotConfirmed,
            SimTime::ZERO,
        );
        let plan = plan_relay(a, NodeId(3)).unwrap();
        assert_eq!(plan.alternate_relay, None);
    }
}
