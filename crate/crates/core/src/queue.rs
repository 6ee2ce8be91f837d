//! Outbound link layer: two strict-priority FIFO classes with drop-tail,
//! a blacklist firewall at enqueue and a trailing-window bandwidth estimate.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::packet::Packet;
use crate::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrafficClass {
    Control,
    Data,
}

impl TrafficClass {
    pub fn of(p: &Packet) -> Self {
        if p.kind.is_control() {
            TrafficClass::Control
        } else {
            TrafficClass::Data
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnqueueResult {
    Accepted,
    /// Class queue full.
    Overflow,
    /// Source is blacklisted.
    Firewall,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueCounters {
    pub overflow_control: u64,
    pub overflow_data: u64,
    pub firewall: u64,
}

impl QueueCounters {
    pub fn overflow(&self) -> u64 {
        self.overflow_control + self.overflow_data
    }
}

#[derive(Debug, Clone)]
pub struct OutboundQueue {
    control: VecDeque<Packet>,
    data: VecDeque<Packet>,
    capacity: usize,
    /// bits per second
    link_rate: u64,
    pub counters: QueueCounters,
}

impl OutboundQueue {
    pub fn new(capacity: usize, link_rate: u64) -> Self {
        OutboundQueue {
            control: VecDeque::new(),
            data: VecDeque::new(),
            capacity,
            link_rate,
            counters: QueueCounters::default(),
        }
    }

    pub fn link_rate(&self) -> u64 {
        self.link_rate
    }

    pub fn occupancy(&self, class: TrafficClass) -> usize {
        match class {
            TrafficClass::Control => self.control.len(),
            TrafficClass::Data => self.data.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.control.is_empty() && self.data.is_empty()
    }

    /// `blocked` is the firewall predicate, applied to the packet's origin
    /// and to the neighbor it arrived from.
    pub fn enqueue(&mut self, p: Packet, blocked: impl Fn(&Packet) -> bool) -> EnqueueResult {
        if blocked(&p) {
            self.counters.firewall += 1;
            return EnqueueResult::Firewall;
        }
        let class = TrafficClass::of(&p);
        let q = match class {
            TrafficClass::Control => &mut self.control,
            TrafficClass::Data => &mut self.data,
        };
        if q.len() >= self.capacity {
            match class {
                TrafficClass::Control => self.counters.overflow_control += 1,
                TrafficClass::Data => self.counters.overflow_data += 1,
            }
            return EnqueueResult::Overflow;
        }
        q.push_back(p);
        EnqueueResult::Accepted
    }

    /// Control first, then data.
    pub fn dequeue(&mut self) -> Option<Packet> {
        self.control.pop_front().or_else(|| self.data.pop_front())
    }

    /// Serialization time of `bytes` at the link rate, rounded up.
    pub fn tx_time(&self, bytes: usize) -> SimTime {
        let bits = bytes as u64 * 8;
        SimTime((bits * 1_000_000).div_ceil(self.link_rate.max(1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthEstimate {
    pub window: SimTime,
    pub bytes_sent_in_window: u64,
    /// bits per second
    pub estimate: f64,
}

/// Trailing-window record of completed transmissions.
#[derive(Debug, Clone)]
pub struct TxHistory {
    window: SimTime,
    link_rate: u64,
    sent: VecDeque<(SimTime, u64)>,
}

impl TxHistory {
    pub fn new(window: SimTime, link_rate: u64) -> Self {
        TxHistory {
            window,
            link_rate,
            sent: VecDeque::new(),
        }
    }

    pub fn record(&mut self, at: SimTime, bytes: u64) {
        self.sent.push_back((at, bytes));
    }

    /// Bytes finished in `(now - window, now]`, as bits per second, capped
    /// at the link rate.
    pub fn estimate_bandwidth(&mut self, now: SimTime) -> BandwidthEstimate {
        if let Some(cutoff) = now.as_micros().checked_sub(self.window.as_micros()) {
            while self
                .sent
                .front()
                .is_some_and(|(t, _)| t.as_micros() <= cutoff)
            {
                self.sent.pop_front();
            }
        }
        let bytes: u64 = self.sent.iter().map(|(_, b)| b).sum();
        let secs = self.window.as_secs_f64();
        let raw = if secs > 0.0 {
            bytes as f64 * 8.0 / secs
        } else {
            0.0
        };
        BandwidthEstimate {
            window: self.window,
            bytes_sent_in_window: bytes,
            estimate: raw.min(self.link_rate as f64),
        }
    }
}
