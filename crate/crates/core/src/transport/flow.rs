use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::newreno::{AckEvent, CcVariant, CwndState, Phase};
use crate::{FlowId, NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrafficKind {
    /// Fixed byte count, sent as fast as the window allows.
    Bulk,
    /// Constant application rate until the end of the run.
    Streaming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub src: NodeId,
    pub dst: NodeId,
    pub start: SimTime,
    pub kind: TrafficKind,
    /// Bulk only.
    pub bytes_total: u64,
    /// Streaming only, bytes per second.
    pub rate: u64,
}

/// Deterministic application bytes for one segment.
pub fn segment_payload(flow: FlowId, seg: u32, len: usize) -> Vec<u8> {
    (0..len)
        .map(|i| {
            (flow.0.wrapping_mul(31) ^ seg.wrapping_mul(7).wrapping_add(i as u32)) as u8 ^ 0x5a
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CwndSample {
    pub time: SimTime,
    pub cwnd: f64,
    pub phase: Phase,
    pub event: String,
}

#[derive(Debug, Clone)]
pub struct FlowSender {
    pub id: FlowId,
    pub spec: FlowSpec,
    pub cc: CwndState,
    pub timeouts: u64,
    pub retransmissions: u64,
    pub cwnd_trace: Vec<CwndSample>,
    /// Bumped whenever the retransmission timer is re-armed; stale expiries
    /// carry an older value.
    pub rto_epoch: u64,
    pub rto_armed: bool,
}

impl FlowSender {
    pub fn new(id: FlowId, spec: FlowSpec, smss: u32, variant: CcVariant) -> Self {
        FlowSender {
            id,
            spec,
            cc: CwndState::new(smss, variant),
            timeouts: 0,
            retransmissions: 0,
            cwnd_trace: Vec::new(),
            rto_epoch: 0,
            rto_armed: false,
        }
    }

    pub fn smss(&self) -> u32 {
        self.cc.smss
    }

    /// Segments the application has produced by `now`.
    pub fn produced(&self, now: SimTime) -> u32 {
        let smss = self.cc.smss as u64;
        match self.spec.kind {
            TrafficKind::Bulk => self.spec.bytes_total.div_ceil(smss) as u32,
            TrafficKind::Streaming => {
                let elapsed = now.saturating_sub(self.spec.start).as_micros() as u128;
                (elapsed * self.spec.rate as u128 / (1_000_000 * smss as u128)) as u32
            }
        }
    }

    pub fn segment_len(&self, seg: u32) -> usize {
        let smss = self.cc.smss as u64;
        match self.spec.kind {
            TrafficKind::Bulk => {
                let start = seg as u64 * smss;
                self.spec.bytes_total.saturating_sub(start).min(smss) as usize
            }
            TrafficKind::Streaming => smss as usize,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.spec.kind == TrafficKind::Bulk && self.cc.snd_una >= self.produced(SimTime::ZERO)
    }

    /// Fresh segments allowed by the window and by what the application has
    /// produced.
    pub fn take_sendable(&mut self, now: SimTime) -> Vec<u32> {
        let produced = self.produced(now);
        let mut out = Vec::new();
        while self.cc.can_send() > 0 && self.cc.snd_nxt < produced {
            out.push(self.cc.on_send());
        }
        out
    }

    fn sample(&mut self, now: SimTime, event: &str) {
        self.cwnd_trace.push(CwndSample {
            time: now,
            cwnd: self.cc.cwnd,
            phase: self.cc.phase,
            event: event.to_string(),
        });
    }

    /// Applies an ACK. Returns the segment to retransmit, if any.
    pub fn on_ack(&mut self, ack: u32, now: SimTime) -> (AckEvent, Option<u32>) {
        let out = self.cc.on_ack(ack);
        let label = match out.event {
            AckEvent::Ignored => None,
            AckEvent::NewAck => Some("ack"),
            AckEvent::Duplicate => Some("dupack"),
            AckEvent::RecoveryInflate => Some("inflate"),
            AckEvent::FastRetransmit => Some("fast_retransmit"),
            AckEvent::PartialAck { .. } => Some("partial_ack"),
            AckEvent::FullAck => Some("full_ack"),
        };
        if let Some(l) = label {
            self.sample(now, l);
        }
        if out.retransmit.is_some() {
            self.retransmissions += 1;
        }
        (out.event, out.retransmit)
    }

    pub fn on_timeout(&mut self, now: SimTime) -> u32 {
        self.timeouts += 1;
        self.retransmissions += 1;
        let seg = self.cc.on_timeout();
        self.sample(now, "timeout");
        seg
    }

    pub fn record_start(&mut self, now: SimTime) {
        self.sample(now, "start");
    }
}

/// Cumulative-ACK receiver with an out-of-order buffer.
#[derive(Debug, Clone, Default)]
pub struct FlowReceiver {
    expected: u32,
    buffered: BTreeSet<u32>,
}

impl FlowReceiver {
    pub fn expected(&self) -> u32 {
        self.expected
    }

    /// Returns the ACK to send and the segments newly released in order.
    pub fn on_segment(&mut self, seg: u32) -> (u32, Vec<u32>) {
        let mut delivered = Vec::new();
        if seg >= self.expected {
            self.buffered.insert(seg);
            while self.buffered.remove(&self.expected) {
                delivered.push(self.expected);
                self.expected += 1;
            }
        }
        (self.expected, delivered)
    }
}
