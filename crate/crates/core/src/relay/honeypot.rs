use std::collections::{BTreeMap, BTreeSet};

use crate::olsr::{BlacklistReason, HelloMessage, LinkStatus, NodeState};
use crate::{NodeId, SimTime};

/// Reacts to a control message from `suspect` that failed authentication:
/// blacklists it and returns the decoy HELLO to send it. The decoy lists the
/// suspect as heard and as selected MPR; it is never used for forwarding.
///
/// Returns `None` for self and for suspects already blacklisted.
pub fn honeypot_blacklist(
    state: &mut NodeState,
    suspect: NodeId,
    now: SimTime,
) -> Option<HelloMessage> {
    if !state.add_to_blacklist(suspect, BlacklistReason::HoneypotConfirmed, now) {
        return None;
    }
    Some(HelloMessage {
        origin: state.id,
        neighbors: BTreeMap::from([(suspect, LinkStatus::Heard)]),
        mpr_selection: BTreeSet::from([suspect]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Adjacency;
    use crate::olsr::flood::converge;
    use crate::olsr::OlsrConfig;

    #[test]
    fn suspect_is_isolated_once() {
        // 0 - 1 - 2 and 0 - 3 - 2
        let adj = Adjacency::from_edges(4, [(0, 1), (1, 2), (0, 3), (3, 2)]);
        let mut states = converge(&adj, OlsrConfig::default());
        let a = &mut states[0];
        assert!(a.routes().mentions(NodeId(1)));

        let decoy = honeypot_blacklist(a, NodeId(1), SimTime::from_secs(1)).expect("first failure");
        assert_eq!(decoy.origin, NodeId(0));
        assert!(decoy.mpr_selection.contains(&NodeId(1)));
        assert!(!decoy.neighbors.contains_key(&decoy.origin));
        assert!(a.is_blacklisted(NodeId(1)));
        assert!(!a.routes().mentions(NodeId(1)));
        assert_eq!(a.routes().next_hop(NodeId(2)), Some(NodeId(3)));

        let snapshot = format!("{:?}", a.blacklist());
        assert!(honeypot_blacklist(a, NodeId(1), SimTime::from_secs(2)).is_none());
        assert_eq!(format!("{:?}", a.blacklist()), snapshot);
    }

    #[test]
    fn self_is_ignored() {
        let mut s = NodeState::new(
            NodeId(4),
            OlsrConfig::default(),
            SimTime::ZERO,
            SimTime::ZERO,
        );
        assert!(honeypot_blacklist(&mut s, NodeId(4), SimTime::ZERO).is_none());
        assert!(s.blacklist().is_empty());
    }

    #[test]
    fn decoy_has_valid_wire_format() {
        let mut s = NodeState::new(
            NodeId(0),
            OlsrConfig::default(),
            SimTime::ZERO,
            SimTime::ZERO,
        );
        let decoy = honeypot_blacklist(&mut s, NodeId(7), SimTime::ZERO).unwrap();
        assert_eq!(HelloMessage::decode(&decoy.encode()).unwrap(), decoy);
    }
}
