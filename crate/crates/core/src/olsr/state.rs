use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::messages::{HelloMessage, LinkStatus, TcMessage};
use super::mpr::MprSet;
use super::routes::{add_edge, shortest_paths, Graph, RoutingTable};
use crate::packet::Packet;
use crate::{NodeId, SimTime};

/// Protocol timers. Defaults follow conventional OLSR magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OlsrConfig {
    pub hello_interval: SimTime,
    pub tc_interval: SimTime,
    pub neighb_hold: SimTime,
    pub top_hold: SimTime,
    pub dup_hold: SimTime,
    pub ttl: u8,
}

impl Default for OlsrConfig {
    fn default() -> Self {
        OlsrConfig {
            hello_interval: SimTime::from_secs(2),
            tc_interval: SimTime::from_secs(5),
            neighb_hold: SimTime::from_secs(6),
            top_hold: SimTime::from_secs(15),
            dup_hold: SimTime::from_secs(30),
            ttl: 255,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkTuple {
    pub status: LinkStatus,
    pub expires: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoHopEntry {
    pub reach: BTreeSet<NodeId>,
    pub expires: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyTuple {
    pub dest: NodeId,
    pub last_hop: NodeId,
    pub ansn: u32,
    pub expires: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateEntry {
    pub origin: NodeId,
    pub seq: u32,
    pub retransmitted: bool,
    pub expires: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlacklistReason {
    AuthFailure,
    HoneypotConfirmed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlacklistEntry {
    pub node: NodeId,
    pub reason: BlacklistReason,
    pub since: SimTime,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OlsrCounters {
    pub malformed: u64,
    pub stale_tc: u64,
    pub mpr_recomputations: u64,
    pub route_recomputations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HelloError {
    #[error("HELLO from {0} lists its own origin")]
    ListsOrigin(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ControlMessage {
    Hello(HelloMessage),
    Tc(TcMessage),
}

/// Per-node OLSR tables plus the routing table derived from them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeState {
    pub id: NodeId,
    pub cfg: OlsrConfig,
    links: BTreeMap<NodeId, LinkTuple>,
    two_hop: BTreeMap<NodeId, TwoHopEntry>,
    mpr: MprSet,
    selectors: BTreeMap<NodeId, SimTime>,
    topology: BTreeMap<(NodeId, NodeId), TopologyTuple>,
    ansn_seen: BTreeMap<NodeId, (u32, SimTime)>,
    duplicates: BTreeMap<(NodeId, u32), DuplicateEntry>,
    blacklist: BTreeMap<NodeId, BlacklistEntry>,
    routes: RoutingTable,
    ansn: u32,
    last_advertised: Option<BTreeSet<NodeId>>,
    next_hello: SimTime,
    next_tc: SimTime,
    pub counters: OlsrCounters,
}

impl NodeState {
    /// `hello_offset` and `tc_offset` stagger the first emissions.
    pub fn new(id: NodeId, cfg: OlsrConfig, hello_offset: SimTime, tc_offset: SimTime) -> Self {
        NodeState {
            id,
            cfg,
            links: BTreeMap::new(),
            two_hop: BTreeMap::new(),
            mpr: MprSet::default(),
            selectors: BTreeMap::new(),
            topology: BTreeMap::new(),
            ansn_seen: BTreeMap::new(),
            duplicates: BTreeMap::new(),
            blacklist: BTreeMap::new(),
            routes: RoutingTable::default(),
            ansn: 0,
            last_advertised: None,
            next_hello: hello_offset,
            next_tc: tc_offset,
            counters: OlsrCounters::default(),
        }
    }

    pub fn link(&self, n: NodeId) -> Option<&LinkTuple> {
        self.links.get(&n)
    }

    pub fn is_symmetric(&self, n: NodeId) -> bool {
        self.links
            .get(&n)
            .is_some_and(|l| l.status == LinkStatus::Symmetric)
    }

    pub fn symmetric_neighbors(&self) -> BTreeSet<NodeId> {
        self.links
            .iter()
            .filter(|(n, l)| l.status == LinkStatus::Symmetric && !self.blacklist.contains_key(*n))
            .map(|(n, _)| *n)
            .collect()
    }

    /// Neighbor -> strict 2-hop nodes it reaches (no self, no 1-hop, no blacklisted).
    pub fn two_hop_reach(&self) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        let one_hop = self.symmetric_neighbors();
        one_hop
            .iter()
            .filter_map(|n| {
                let e = self.two_hop.get(n)?;
                let reach: BTreeSet<NodeId> = e
                    .reach
                    .iter()
                    .filter(|t| {
                        **t != self.id && !one_hop.contains(t) && !self.blacklist.contains_key(t)
                    })
                    .copied()
                    .collect();
                Some((*n, reach))
            })
            .collect()
    }

    pub fn mpr_set(&self) -> &MprSet {
        &self.mpr
    }

    pub fn selectors(&self) -> BTreeSet<NodeId> {
        self.selectors.keys().copied().collect()
    }

    pub fn topology(&self) -> impl Iterator<Item = &TopologyTuple> {
        self.topology.values()
    }

    pub fn routes(&self) -> &RoutingTable {
        &self.routes
    }

    pub fn blacklist(&self) -> &BTreeMap<NodeId, BlacklistEntry> {
        &self.blacklist
    }

    pub fn is_blacklisted(&self, n: NodeId) -> bool {
        self.blacklist.contains_key(&n)
    }

    pub fn ansn(&self) -> u32 {
        self.ansn
    }

    pub fn next_due(&self) -> SimTime {
        self.next_hello.min(self.next_tc)
    }

    fn neighborhood_snapshot(&self) -> (BTreeSet<NodeId>, BTreeMap<NodeId, BTreeSet<NodeId>>) {
        (self.symmetric_neighbors(), self.two_hop_reach())
    }

    fn refresh_mprs(&mut self) {
        let (one, two) = self.neighborhood_snapshot();
        self.mpr = self.mpr.select(&one, &two);
        self.counters.mpr_recomputations += 1;
    }

    pub fn recompute_routes(&mut self) {
        self.routes = self.compute_routes();
        self.counters.route_recomputations += 1;
    }

    /// The graph this node currently knows: its symmetric links, its
    /// neighbors' symmetric links and advertised topology links.
    pub fn known_graph(&self) -> Graph {
        let mut g = Graph::new();
        for n in self.symmetric_neighbors() {
            add_edge(&mut g, self.id, n);
        }
        for (n, reach) in self.two_hop_reach() {
            for t in reach {
                add_edge(&mut g, n, t);
            }
        }
        for t in self.topology.values() {
            add_edge(&mut g, t.last_hop, t.dest);
        }
        g
    }

    pub fn compute_routes(&self) -> RoutingTable {
        let excluded: BTreeSet<NodeId> = self.blacklist.keys().copied().collect();
        shortest_paths(self.id, &self.known_graph(), &excluded)
    }

    /// Drops expired state. Returns true if anything route-relevant changed.
    pub fn purge(&mut self, now: SimTime) -> bool {
        let before = self.neighborhood_snapshot();
        let n_links = self.links.len();
        let n_two = self.two_hop.len();
        let n_top = self.topology.len();
        self.links.retain(|_, l| l.expires >= now);
        let links = &self.links;
        self.two_hop.retain(|n, e| {
            e.expires >= now
                && links
                    .get(n)
                    .is_some_and(|l| l.status == LinkStatus::Symmetric)
        });
        self.selectors
            .retain(|n, exp| *exp >= now && links.contains_key(n));
        self.topology.retain(|_, t| t.expires >= now);
        self.ansn_seen.retain(|_, (_, exp)| *exp >= now);
        self.duplicates.retain(|_, d| d.expires >= now);
        let changed = n_links != self.links.len()
            || n_two != self.two_hop.len()
            || n_top != self.topology.len();
        if changed {
            if self.neighborhood_snapshot() != before {
                self.refresh_mprs();
            }
            self.recompute_routes();
        }
        changed
    }

    pub fn process_hello(&mut self, msg: &HelloMessage, now: SimTime) -> Result<(), HelloError> {
        if msg.origin == self.id || self.is_blacklisted(msg.origin) {
            return Ok(());
        }
        if msg.neighbors.contains_key(&msg.origin) {
            self.counters.malformed += 1;
            return Err(HelloError::ListsOrigin(msg.origin));
        }
        self.purge(now);
        let before = self.neighborhood_snapshot();
        let routes_before = (self.links.clone(), self.two_hop.clone());

        let expires = now + self.cfg.neighb_hold;
        let status = if msg.neighbors.contains_key(&self.id) {
            LinkStatus::Symmetric
        } else {
            LinkStatus::Heard
        };
        self.links.insert(msg.origin, LinkTuple { status, expires });

        if status == LinkStatus::Symmetric {
            let reach = msg
                .neighbors
                .iter()
                .filter(|(n, s)| **s == LinkStatus::Symmetric && **n != self.id)
                .map(|(n, _)| *n)
                .collect();
            self.two_hop
                .insert(msg.origin, TwoHopEntry { reach, expires });
            if msg.mpr_selection.contains(&self.id) {
                self.selectors.insert(msg.origin, expires);
            } else {
                self.selectors.remove(&msg.origin);
            }
        } else {
            self.two_hop.remove(&msg.origin);
            self.selectors.remove(&msg.origin);
        }

        if self.neighborhood_snapshot() != before {
            self.refresh_mprs();
        }
        let structural = {
            let strip = |m: &BTreeMap<NodeId, LinkTuple>| {
                m.iter().map(|(k, v)| (*k, v.status)).collect::<Vec<_>>()
            };
            let strip2 = |m: &BTreeMap<NodeId, TwoHopEntry>| {
                m.iter()
                    .map(|(k, v)| (*k, v.reach.clone()))
                    .collect::<Vec<_>>()
            };
            strip(&routes_before.0) != strip(&self.links)
                || strip2(&routes_before.1) != strip2(&self.two_hop)
        };
        if structural {
            self.recompute_routes();
        }
        Ok(())
    }

    /// True when this exact flooded message was already received.
    pub fn is_duplicate(&self, origin: NodeId, seq: u32) -> bool {
        self.duplicates.contains_key(&(origin, seq))
    }

    /// MPR forwarding rule. Forward iff the message has not been
    /// retransmitted here yet, its TTL is above one and the sender selected
    /// this node as MPR. Records the message in the duplicate set either way
    /// and decrements the TTL when forwarding.
    pub fn should_forward(&mut self, packet: &mut Packet, now: SimTime) -> bool {
        let key = (packet.origin, packet.seq);
        let expires = now + self.cfg.dup_hold;
        let entry = self.duplicates.entry(key).or_insert(DuplicateEntry {
            origin: packet.origin,
            seq: packet.seq,
            retransmitted: false,
            expires,
        });
        if entry.retransmitted || packet.origin == self.id {
            return false;
        }
        let selected_by_sender = self
            .selectors
            .get(&packet.sender)
            .is_some_and(|exp| *exp >= now);
        if packet.ttl > 1 && selected_by_sender {
            entry.retransmitted = true;
            entry.expires = expires;
            packet.ttl -= 1;
            true
        } else {
            false
        }
    }

    /// Classic flooding rule used as the economy baseline: retransmit every
    /// fresh message once.
    pub fn should_forward_classic(&mut self, packet: &mut Packet, now: SimTime) -> bool {
        let key = (packet.origin, packet.seq);
        if self.duplicates.contains_key(&key) || packet.origin == self.id {
            return false;
        }
        self.duplicates.insert(
            key,
            DuplicateEntry {
                origin: packet.origin,
                seq: packet.seq,
                retransmitted: packet.ttl > 1,
                expires: now + self.cfg.dup_hold,
            },
        );
        if packet.ttl > 1 {
            packet.ttl -= 1;
            true
        } else {
            false
        }
    }

    /// Returns true when the topology set changed.
    pub fn process_tc(&mut self, msg: &TcMessage, now: SimTime) -> bool {
        if msg.origin == self.id || self.is_blacklisted(msg.origin) {
            return false;
        }
        self.purge(now);
        let expires = now + self.cfg.top_hold;
        if let Some(&(stored, _)) = self.ansn_seen.get(&msg.origin) {
            if msg.ansn < stored {
                self.counters.stale_tc += 1;
                return false;
            }
        }
        let before: Vec<(NodeId, NodeId)> = self.topology.keys().copied().collect();
        self.topology.retain(|_, t| t.last_hop != msg.origin);
        for &dest in &msg.advertised {
            self.topology.insert(
                (dest, msg.origin),
                TopologyTuple {
                    dest,
                    last_hop: msg.origin,
                    ansn: msg.ansn,
                    expires,
                },
            );
        }
        self.ansn_seen.insert(msg.origin, (msg.ansn, expires));
        let changed = before != self.topology.keys().copied().collect::<Vec<_>>();
        if changed {
            self.recompute_routes();
        }
        changed
    }

    pub fn build_hello(&self) -> HelloMessage {
        HelloMessage {
            origin: self.id,
            neighbors: self
                .links
                .iter()
                .filter(|(n, _)| !self.blacklist.contains_key(*n))
                .map(|(n, l)| (*n, l.status))
                .collect(),
            mpr_selection: self.mpr.members.clone(),
        }
    }

    /// Emits every message whose timer has come due: a HELLO every
    /// `hello_interval`, and a TC every `tc_interval` while the selector set
    /// is non-empty. The ANSN moves whenever the advertised set changes.
    pub fn periodic_emission(&mut self, now: SimTime) -> Vec<ControlMessage> {
        self.purge(now);
        let mut out = Vec::new();
        if self.next_hello <= now {
            out.push(ControlMessage::Hello(self.build_hello()));
            while self.next_hello <= now {
                self.next_hello += self.cfg.hello_interval;
            }
        }
        if self.next_tc <= now {
            while self.next_tc <= now {
                self.next_tc += self.cfg.tc_interval;
            }
            let advertised = self.selectors();
            if !advertised.is_empty() {
                if self.last_advertised.as_ref() != Some(&advertised) {
                    self.ansn += 1;
                    self.last_advertised = Some(advertised.clone());
                }
                out.push(ControlMessage::Tc(TcMessage {
                    origin: self.id,
                    advertised,
                    ansn: self.ansn,
                    ttl: self.cfg.ttl,
                }));
            }
        }
        out
    }

    /// Adds `node` to the blacklist and drops all state involving it.
    /// Returns false if it was already listed or is this node.
    pub fn add_to_blacklist(
        &mut self,
        node: NodeId,
        reason: BlacklistReason,
        now: SimTime,
    ) -> bool {
        if node == self.id || self.blacklist.contains_key(&node) {
            return false;
        }
        self.blacklist.insert(
            node,
            BlacklistEntry {
                node,
                reason,
                since: now,
            },
        );
        self.links.remove(&node);
        self.two_hop.remove(&node);
        self.selectors.remove(&node);
        self.topology
            .retain(|_, t| t.last_hop != node && t.dest != node);
        self.refresh_mprs();
        self.recompute_routes();
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::PacketKey;
    use crate::packet::{Packet, PacketKind};

    const A: NodeId = NodeId(1);
    const B: NodeId = NodeId(2);
    const C: NodeId = NodeId(3);

    fn state(id: NodeId) -> NodeState {
        NodeState::new(id, OlsrConfig::default(), SimTime::ZERO, SimTime::ZERO)
    }

    fn hello(origin: NodeId, sym: &[NodeId], heard: &[NodeId], mprs: &[NodeId]) -> HelloMessage {
        HelloMessage {
            origin,
            neighbors: sym
                .iter()
                .map(|n| (*n, LinkStatus::Symmetric))
                .chain(heard.iter().map(|n| (*n, LinkStatus::Heard)))
                .collect(),
            mpr_selection: mprs.iter().copied().collect(),
        }
    }

    fn flooded(origin: NodeId, seq: u32, ttl: u8, sender: NodeId) -> Packet {
        let mut p = Packet::sealed(
            &PacketKey::new(&[0; 16]).unwrap(),
            PacketKind::Tc,
            false,
            origin,
            None,
            seq,
            None,
            0,
            0,
            &[],
            ttl,
        );
        p.sender = sender;
        p
    }

    #[test]
    fn one_way_hello_is_heard_only() {
        let mut a = state(A);
        a.process_hello(&hello(B, &[], &[], &[]), SimTime::ZERO)
            .unwrap();
        assert_eq!(a.link(B).unwrap().status, LinkStatus::Heard);
        assert!(a.symmetric_neighbors().is_empty());
    }

    #[test]
    fn listing_us_completes_handshake() {
        let mut a = state(A);
        a.process_hello(&hello(B, &[], &[A], &[]), SimTime::ZERO)
            .unwrap();
        assert!(a.is_symmetric(B));
        assert_eq!(a.routes().next_hop(B), Some(B));
    }

    #[test]
    fn mpr_selection_enters_selector_set_and_enables_tc() {
        let mut a = state(A);
        a.process_hello(&hello(B, &[A], &[], &[A]), SimTime::ZERO)
            .unwrap();
        assert_eq!(a.selectors(), BTreeSet::from([B]));
        let out = a.periodic_emission(SimTime::ZERO);
        assert!(out
            .iter()
            .any(|m| matches!(m, ControlMessage::Tc(tc) if tc.advertised.contains(&B))));
    }

    #[test]
    fn hello_listing_origin_is_malformed() {
        let mut a = state(A);
        assert_eq!(
            a.process_hello(&hello(B, &[B], &[], &[]), SimTime::ZERO),
            Err(HelloError::ListsOrigin(B))
        );
        assert_eq!(a.counters.malformed, 1);
        assert!(a.link(B).is_none());
    }

    #[test]
    fn two_hop_and_mpr_from_hellos() {
        let mut a = state(A);
        a.process_hello(&hello(B, &[A, C], &[], &[]), SimTime::ZERO)
            .unwrap();
        assert_eq!(a.two_hop_reach()[&B], BTreeSet::from([C]));
        assert_eq!(a.mpr_set().members, BTreeSet::from([B]));
        assert_eq!(a.mpr_set().seq_num, 1);
        let r = a.routes().get(C).unwrap();
        assert_eq!((r.next_hop, r.hop_count), (B, 2));
    }

    #[test]
    fn links_expire_after_hold() {
        let mut a = state(A);
        a.process_hello(&hello(B, &[A], &[], &[]), SimTime::ZERO)
            .unwrap();
        assert!(a.purge(SimTime::from_secs(7)));
        assert!(a.link(B).is_none());
        assert!(a.routes().is_empty());
    }

    #[test]
    fn ttl_one_processed_not_forwarded() {
        let mut a = state(A);
        a.process_hello(&hello(B, &[A], &[], &[A]), SimTime::ZERO)
            .unwrap();
        let mut p = flooded(C, 1, 1, B);
        assert!(!a.is_duplicate(C, 1));
        assert!(!a.should_forward(&mut p, SimTime::ZERO));
        assert!(a.is_duplicate(C, 1));
    }

    #[test]
    fn forwards_once_for_selector() {
        let mut a = state(A);
        a.process_hello(&hello(B, &[A], &[], &[A]), SimTime::ZERO)
            .unwrap();
        let mut p = flooded(C, 1, 5, B);
        assert!(a.should_forward(&mut p, SimTime::ZERO));
        assert_eq!(p.ttl, 4);
        let mut again = flooded(C, 1, 5, B);
        assert!(!a.should_forward(&mut again, SimTime::ZERO));
    }

    #[test]
    fn non_selector_sender_not_forwarded() {
        let mut a = state(A);
        a.process_hello(&hello(B, &[A], &[], &[]), SimTime::ZERO)
            .unwrap();
        let mut p = flooded(C, 1, 5, B);
        assert!(!a.should_forward(&mut p, SimTime::ZERO));
        assert_eq!(p.ttl, 5);
    }

    fn tc(origin: NodeId, adv: &[NodeId], ansn: u32) -> TcMessage {
        TcMessage {
            origin,
            advertised: adv.iter().copied().collect(),
            ansn,
            ttl: 255,
        }
    }

    #[test]
    fn tc_insert_stale_and_purge() {
        let x = NodeId(9);
        let mut s = state(A);
        assert!(s.process_tc(&tc(x, &[A], 1), SimTime::ZERO));
        let tuples: Vec<_> = s.topology().map(|t| (t.dest, t.last_hop)).collect();
        assert_eq!(tuples, vec![(A, x)]);

        assert!(s.process_tc(&tc(x, &[B, C], 3), SimTime::ZERO));
        assert!(!s.process_tc(&tc(x, &[A], 2), SimTime::ZERO));
        assert_eq!(s.counters.stale_tc, 1);

        assert!(s.process_tc(&tc(x, &[], 4), SimTime::ZERO));
        assert_eq!(s.topology().count(), 0);
    }

    #[test]
    fn hello_timer_arithmetic() {
        let mut a = state(A);
        let hellos = [0u64, 2, 4]
            .iter()
            .flat_map(|t| a.periodic_emission(SimTime::from_secs(*t)))
            .filter(|m| matches!(m, ControlMessage::Hello(_)))
            .count();
        assert_eq!(hellos, 3);
    }

    #[test]
    fn no_tc_without_selectors() {
        let mut a = state(A);
        let out = a.periodic_emission(SimTime::ZERO);
        assert_eq!(out.len(), 1);
        assert!(matches!(out[0], ControlMessage::Hello(_)));
    }

    #[test]
    fn ansn_moves_with_advertised_set() {
        let mut a = state(A);
        let mut ansns = vec![];
        let mut t = SimTime::ZERO;
        let step = |a: &mut NodeState, t: SimTime, ansns: &mut Vec<u32>| {
            for m in a.periodic_emission(t) {
                if let ControlMessage::Tc(tc) = m {
                    ansns.push(tc.ansn);
                }
            }
        };
        a.process_hello(&hello(B, &[A], &[], &[A]), t).unwrap();
        step(&mut a, t, &mut ansns);
        t = SimTime::from_secs(5);
        a.process_hello(&hello(B, &[A], &[], &[A]), t).unwrap();
        step(&mut a, t, &mut ansns);
        t = SimTime::from_secs(10);
        a.process_hello(&hello(B, &[A], &[], &[A]), t).unwrap();
        a.process_hello(&hello(C, &[A], &[], &[A]), t).unwrap();
        step(&mut a, t, &mut ansns);
        assert_eq!(ansns, vec![1, 1, 2]);
    }

    #[test]
    fn blacklist_removes_from_routes_and_mprs() {
        let mut a = state(A);
        a.process_hello(&hello(B, &[A, C], &[], &[]), SimTime::ZERO)
            .unwrap();
        assert!(a.add_to_blacklist(B, BlacklistReason::HoneypotConfirmed, SimTime::ZERO));
        assert!(!a.add_to_blacklist(B, BlacklistReason::HoneypotConfirmed, SimTime::ZERO));
        assert!(!a.add_to_blacklist(A, BlacklistReason::AuthFailure, SimTime::ZERO));
        assert!(a.mpr_set().members.is_empty());
        assert!(!a.routes().mentions(B));
        assert!(a.routes().get(C).is_none());
        // Later HELLOs from B are ignored.
        a.process_hello(&hello(B, &[A], &[], &[A]), SimTime::ZERO)
            .unwrap();
        assert!(a.link(B).is_none());
    }
}
