//! Synchronous harness for static topologies: converge HELLO state on a
//! fixed graph, then flood one message and count retransmissions.

use std::collections::{BTreeSet, VecDeque};

use super::state::{NodeState, OlsrConfig};
use crate::crypto::PacketKey;
use crate::kernel::Adjacency;
use crate::packet::{Packet, PacketKind};
use crate::{NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloodMode {
    Mpr,
    Classic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloodOutcome {
    pub reached: BTreeSet<NodeId>,
    /// Transmissions after the originator's own.
    pub retransmissions: usize,
}

/// Runs four lock-step HELLO rounds at t=0, enough for symmetric links,
/// 2-hop sets, MPR choices and MPR-selector sets to settle on a static graph.
pub fn converge(adj: &Adjacency, cfg: OlsrConfig) -> Vec<NodeState> {
    let n = adj.len();
    let mut states: Vec<NodeState> = (0..n as u32)
        .map(|i| NodeState::new(NodeId(i), cfg, SimTime::ZERO, SimTime::MAX))
        .collect();
    for _ in 0..4 {
        let hellos: Vec<_> = states.iter().map(NodeState::build_hello).collect();
        for (i, h) in hellos.iter().enumerate() {
            for nb in adj.neighbors(NodeId(i as u32)) {
                states[nb.index()]
                    .process_hello(h, SimTime::ZERO)
                    .expect("well-formed HELLO");
            }
        }
    }
    states
}

/// Floods one TC-type message from `origin` over `adj`, delivering
/// transmissions in FIFO order and receivers in id order.
pub fn flood(
    states: &mut [NodeState],
    adj: &Adjacency,
    origin: NodeId,
    mode: FloodMode,
) -> FloodOutcome {
    let key = PacketKey::new(&[0u8; 16]).expect("16-byte key");
    let ttl = states[origin.index()].cfg.ttl;
    let seq = u32::MAX;
    let msg = Packet::sealed(
        &key,
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

    let mut reached = BTreeSet::from([origin]);
    let mut retransmissions = 0;
    let mut air: VecDeque<Packet> = VecDeque::from([msg]);
    while let Some(tx) = air.pop_front() {
        for &rx in adj.neighbors(tx.sender) {
            let mut copy = tx.clone();
            let st = &mut states[rx.index()];
            if !st.is_duplicate(copy.origin, copy.seq) && rx != origin {
                reached.insert(rx);
            }
            let fwd = match mode {
                FloodMode::Mpr => st.should_forward(&mut copy, SimTime::ZERO),
                FloodMode::Classic => st.should_forward_classic(&mut copy, SimTime::ZERO),
            };
            if fwd {
                copy.sender = rx;
                retransmissions += 1;
                air.push_back(copy);
            }
        }
    }
    FloodOutcome {
        reached,
        retransmissions,
    }
}

/// Converges and floods in one call.
pub fn flood_static(adj: &Adjacency, origin: NodeId, mode: FloodMode) -> FloodOutcome {
    let mut states = converge(adj, OlsrConfig::default());
    flood(&mut states, adj, origin, mode)
}

/// MPR sets after convergence, for inspection.
pub fn converged_mprs(adj: &Adjacency) -> Vec<BTreeSet<NodeId>> {
    converge(adj, OlsrConfig::default())
        .iter()
        .map(|s| s.mpr_set().members.clone())
        .collect()
}
