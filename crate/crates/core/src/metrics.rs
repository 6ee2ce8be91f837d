//! QoS accounting and the run report.
//!
//! A flow's unit of account is the segment. A segment is sent on its first
//! transmission and delivered when the destination application releases it.
//! An undelivered segment is charged to the last loss seen for any copy of
//! it; with no loss on record it is still in flight when the run ends.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admission::Admission;
use crate::olsr::BlacklistReason;
use crate::transport::CwndSample;
use crate::{FlowId, NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropCause {
    Overflow,
    Firewall,
    /// Dropped by a blackhole or greyhole.
    Blackhole,
    /// Quarantined copy that never verified.
    Integrity,
    Ttl,
    /// No next hop, or the next hop moved out of range.
    NoRoute,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub overflow: u64,
    pub firewall: u64,
    pub blackhole: u64,
    pub integrity: u64,
    pub ttl: u64,
    pub no_route: u64,
}

impl DropCounts {
    pub fn add(&mut self, cause: DropCause) {
        *self.slot(cause) += 1;
    }

    fn slot(&mut self, cause: DropCause) -> &mut u64 {
        match cause {
            DropCause::Overflow => &mut self.overflow,
            DropCause::Firewall => &mut self.firewall,
            DropCause::Blackhole => &mut self.blackhole,
            DropCause::Integrity => &mut self.integrity,
            DropCause::Ttl => &mut self.ttl,
            DropCause::NoRoute => &mut self.no_route,
        }
    }

    pub fn total(&self) -> u64 {
        self.overflow + self.firewall + self.blackhole + self.integrity + self.ttl + self.no_route
    }

    fn merge(&mut self, o: &DropCounts) {
        self.overflow += o.overflow;
        self.firewall += o.firewall;
        self.blackhole += o.blackhole;
        self.integrity += o.integrity;
        self.ttl += o.ttl;
        self.no_route += o.no_route;
    }
}

pub fn pdr(sent: u64, delivered: u64) -> f64 {
    if sent == 0 {
        0.0
    } else {
        delivered as f64 / sent as f64
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Mean absolute difference of consecutive delays.
pub fn jitter(delays: &[f64]) -> f64 {
    let diffs: Vec<f64> = delays.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    mean(&diffs)
}

pub fn throughput_bps(delivered_bytes: u64, span: SimTime) -> f64 {
    if span == SimTime::ZERO {
        0.0
    } else {
        delivered_bytes as f64 * 8.0 / span.as_secs_f64()
    }
}

/// Per-flow bookkeeping filled in while the simulation runs.
#[derive(Debug, Clone)]
pub struct FlowLedger {
    pub flow: FlowId,
    pub src: NodeId,
    pub dst: NodeId,
    pub start: SimTime,
    pub admission: Option<Admission>,
    first_sent: BTreeMap<u32, SimTime>,
    /// (segment, delay seconds, payload bytes) in delivery order.
    delivered: Vec<(u32, f64, usize)>,
    delivered_set: BTreeMap<u32, SimTime>,
    last_loss: BTreeMap<u32, DropCause>,
    pub duplicate_deliveries: u64,
}

impl FlowLedger {
    pub fn new(flow: FlowId, src: NodeId, dst: NodeId, start: SimTime) -> Self {
        FlowLedger {
            flow,
            src,
            dst,
            start,
            admission: None,
            first_sent: BTreeMap::new(),
            delivered: Vec::new(),
            delivered_set: BTreeMap::new(),
            last_loss: BTreeMap::new(),
            duplicate_deliveries: 0,
        }
    }

    pub fn on_send(&mut self, seg: u32, now: SimTime) {
        self.first_sent.entry(seg).or_insert(now);
    }

    pub fn on_loss(&mut self, seg: u32, cause: DropCause) {
        if !self.delivered_set.contains_key(&seg) {
            self.last_loss.insert(seg, cause);
        }
    }

    pub fn on_deliver(&mut self, seg: u32, bytes: usize, now: SimTime) {
        if self.delivered_set.contains_key(&seg) {
            self.duplicate_deliveries += 1;
            return;
        }
        let sent = self.first_sent.get(&seg).copied().unwrap_or(now);
        self.delivered_set.insert(seg, now);
        self.last_loss.remove(&seg);
        self.delivered
            .push((seg, (now - sent).as_secs_f64(), bytes));
    }

    pub fn finalize(&self, end: SimTime) -> FlowMetrics {
        let sent = self.first_sent.len() as u64;
        let delivered = self.delivered.len() as u64;
        let mut drops = DropCounts::default();
        let mut in_flight = 0;
        for seg in self.first_sent.keys() {
            if self.delivered_set.contains_key(seg) {
                continue;
            }
            match self.last_loss.get(seg) {
                Some(c) => drops.add(*c),
                None => in_flight += 1,
            }
        }
        let delays: Vec<f64> = self.delivered.iter().map(|d| d.1).collect();
        let bytes: u64 = self.delivered.iter().map(|d| d.2 as u64).sum();
        FlowMetrics {
            flow_id: self.flow,
            src: self.src,
            dst: self.dst,
            admission: self.admission,
            sent,
            delivered,
            pdr: pdr(sent, delivered),
            mean_delay: mean(&delays),
            jitter: jitter(&delays),
            throughput_bps: throughput_bps(bytes, end.saturating_sub(self.start)),
            delivered_bytes: bytes,
            drops,
            in_flight,
            delays,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowMetrics {
    pub flow_id: FlowId,
    pub src: NodeId,
    pub dst: NodeId,
    pub admission: Option<Admission>,
    pub sent: u64,
    pub delivered: u64,
    pub pdr: f64,
    /// seconds
    pub mean_delay: f64,
    /// seconds
    pub jitter: f64,
    pub throughput_bps: f64,
    pub delivered_bytes: u64,
    pub drops: DropCounts,
    pub in_flight: u64,
    /// Per-segment delays in delivery order, seconds.
    #[serde(skip)]
    pub delays: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub sent: u64,
    pub delivered: u64,
    pub pdr: f64,
    pub mean_delay: f64,
    /// Mean of all consecutive-delay differences, pooled across flows.
    pub jitter: f64,
    /// Sum of the per-flow throughputs.
    pub throughput_bps: f64,
    pub drops: DropCounts,
    pub in_flight: u64,
}

impl Aggregate {
    pub fn of(flows: &[FlowMetrics]) -> Self {
        let sent = flows.iter().map(|f| f.sent).sum();
        let delivered = flows.iter().map(|f| f.delivered).sum();
        let all_delays: Vec<f64> = flows
            .iter()
            .flat_map(|f| f.delays.iter().copied())
            .collect();
        let diffs: Vec<f64> = flows
            .iter()
            .flat_map(|f| f.delays.windows(2).map(|w| (w[1] - w[0]).abs()))
            .collect();
        let mut drops = DropCounts::default();
        for f in flows {
            drops.merge(&f.drops);
        }
        Aggregate {
            sent,
            delivered,
            pdr: pdr(sent, delivered),
            mean_delay: mean(&all_delays),
            jitter: mean(&diffs),
            throughput_bps: flows.iter().map(|f| f.throughput_bps).sum(),
            drops,
            in_flight: flows.iter().map(|f| f.in_flight).sum(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCounters {
    pub node: NodeId,
    pub tx_packets: u64,
    pub tx_bytes: u64,
    pub control_bytes: u64,
    pub overflow_control: u64,
    pub overflow_data: u64,
    pub firewall: u64,
    pub auth_failures: u64,
    /// Quarantined packets that belonged to no flow (forged traffic).
    pub forged_rejected: u64,
    pub malformed_hello: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlacklistEvent {
    pub time: SimTime,
    pub node: NodeId,
    pub suspect: NodeId,
    pub reason: BlacklistReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CwndTrace {
    pub flow_id: FlowId,
    pub samples: Vec<CwndSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub seed: u64,
    pub duration: SimTime,
    pub flows: Vec<FlowMetrics>,
    pub aggregate: Aggregate,
    /// Every packet-level drop, including ACKs and control traffic.
    pub drop_events: DropCounts,
    pub control_bytes: u64,
    pub total_bytes: u64,
    /// control bytes / total bytes transmitted
    pub control_overhead: f64,
    pub nodes: Vec<NodeCounters>,
    pub eavesdropper_recovered_bytes: u64,
    pub integrity_blocked: u64,
    pub blacklist_events: Vec<BlacklistEvent>,
    pub isolation_violations: u64,
    pub duplicate_deliveries: u64,
    pub payload_mismatches: u64,
    pub cwnd_traces: Vec<CwndTrace>,
    /// In-engine checks that failed; empty on a healthy run.
    pub assertion_failures: Vec<String>,
    pub events_processed: u64,
    pub trace_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "flow {flow}: sent {sent} != delivered {delivered} + drops {drops} + in flight {in_flight}"
)]
pub struct AccountingError {
    pub flow: FlowId,
    pub sent: u64,
    pub delivered: u64,
    pub drops: u64,
    pub in_flight: u64,
}

pub const CSV_HEADER: &str =
    "flow_id,src,dst,sent,delivered,pdr,mean_delay_ms,jitter_ms,throughput_bps,\
drops_overflow,drops_firewall,drops_blackhole,drops_integrity,drops_ttl";

impl MetricsReport {
    /// sent = delivered + drops + in flight, for every flow.
    pub fn check_accounting(&self) -> Result<(), AccountingError> {
        for f in &self.flows {
            if f.sent != f.delivered + f.drops.total() + f.in_flight || f.delivered > f.sent {
                return Err(AccountingError {
                    flow: f.flow_id,
                    sent: f.sent,
                    delivered: f.delivered,
                    drops: f.drops.total(),
                    in_flight: f.in_flight,
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per flow plus an `all` row. `no_route` drops appear only in JSON.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CSV_HEADER}");
        let row = |out: &mut String,
                   id: &str,
                   src: &str,
                   dst: &str,
                   sent: u64,
                   delivered: u64,
                   pdr: f64,
                   delay: f64,
                   jit: f64,
                   tput: f64,
                   d: &DropCounts| {
            let _ = writeln!(
                out,
                "{id},{src},{dst},{sent},{delivered},{pdr:.6},{:.3},{:.3},{tput:.1},{},{},{},{},{}",
                delay * 1e3,
                jit * 1e3,
                d.overflow,
                d.firewall,
                d.blackhole,
                d.integrity,
                d.ttl
            );
        };
        for f in &self.flows {
            row(
                &mut out,
                &f.flow_id.0.to_string(),
                &f.src.0.to_string(),
                &f.dst.0.to_string(),
                f.sent,
                f.delivered,
                f.pdr,
                f.mean_delay,
                f.jitter,
                f.throughput_bps,
                &f.drops,
            );
        }
        let a = &self.aggregate;
        row(
            &mut out,
            "all",
            "-",
            "-",
            a.sent,
            a.delivered,
            a.pdr,
            a.mean_delay,
            a.jitter,
            a.throughput_bps,
            &a.drops,
        );
        out
    }
}
