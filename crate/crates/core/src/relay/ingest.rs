use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::crypto::PacketKey;
use crate::packet::{Packet, PacketKind};
use crate::{FlowId, NodeId, SimTime};

pub const DEFAULT_HOLD: SimTime = SimTime::from_secs(2);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestOutcome {
    Deliver(Vec<u8>),
    DiscardDuplicate,
    Quarantine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReassemblyEntry {
    pub origin: NodeId,
    pub seq: u32,
    pub first_arrival: SimTime,
    pub kind: PacketKind,
    /// Flow and segment of the first unverified copy, for loss attribution.
    pub flow: Option<FlowId>,
    pub segment: u32,
}

/// A quarantined copy that no verified copy ever rescued.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expired {
    pub origin: NodeId,
    pub seq: u32,
    pub kind: PacketKind,
    pub flow: Option<FlowId>,
    pub segment: u32,
}

/// Destination-side reconciliation of primary and alternate copies.
///
/// Delivered ids are remembered for the whole run so late replays are
/// discarded too. Quarantined ids are held for `hold` and then dropped.
#[derive(Debug, Clone)]
pub struct Reassembly {
    hold: SimTime,
    quarantined: BTreeMap<(NodeId, u32), ReassemblyEntry>,
    delivered: BTreeSet<(NodeId, u32)>,
    pub integrity_blocked: u64,
}

impl Reassembly {
    pub fn new(hold: SimTime) -> Self {
        Reassembly {
            hold,
            quarantined: BTreeMap::new(),
            delivered: BTreeSet::new(),
            integrity_blocked: 0,
        }
    }

    pub fn hold(&self) -> SimTime {
        self.hold
    }

    pub fn was_delivered(&self, origin: NodeId, seq: u32) -> bool {
        self.delivered.contains(&(origin, seq))
    }

    pub fn quarantined(&self) -> usize {
        self.quarantined.len()
    }

    /// `key` is `None` at nodes that hold no network key; nothing verifies there.
    pub fn ingest(&mut self, p: &Packet, key: Option<&PacketKey>, now: SimTime) -> IngestOutcome {
        let id = (p.origin, p.seq);
        if self.delivered.contains(&id) {
            return IngestOutcome::DiscardDuplicate;
        }
        match key.and_then(|k| p.open(k)) {
            Some(payload) => {
                self.quarantined.remove(&id);
                self.delivered.insert(id);
                IngestOutcome::Deliver(payload)
            }
            None => {
                self.quarantined.entry(id).or_insert(ReassemblyEntry {
                    origin: p.origin,
                    seq: p.seq,
                    first_arrival: now,
                    kind: p.kind,
                    flow: p.flow,
                    segment: p.segment,
                });
                IngestOutcome::Quarantine
            }
        }
    }

    /// Drops quarantined entries whose hold elapsed by `now`. Each one
    /// carrying a flow counts as integrity-blocked.
    pub fn expire(&mut self, now: SimTime) -> Vec<Expired> {
        let hold = self.hold;
        let due: Vec<(NodeId, u32)> = self
            .quarantined
            .iter()
            .filter(|(_, e)| e.first_arrival + hold <= now)
            .map(|(k, _)| *k)
            .collect();
        let mut out = Vec::with_capacity(due.len());
        for k in due {
            let e = self.quarantined.remove(&k).expect("listed above");
            if e.flow.is_some() {
                self.integrity_blocked += 1;
            }
            out.push(Expired {
                origin: e.origin,
                seq: e.seq,
                kind: e.kind,
                flow: e.flow,
                segment: e.segment,
            });
        }
        out
    }
}
