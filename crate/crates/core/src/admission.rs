//! Admission control, evaluated once when a flow is due to start.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Capacity,
    NoRoute,
    Bandwidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "decision", content = "reason")]
pub enum Admission {
    Admitted,
    Rejected(RejectReason),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissionInput {
    /// Concurrent flows allowed per source.
    pub capacity: usize,
    pub active_at_src: usize,
    pub route_exists: bool,
    /// bits per second
    pub link_rate: u64,
    /// Current outbound usage estimate at the source, bits per second.
    pub estimated_use: f64,
    /// Free bandwidth required per flow, bits per second.
    pub reservation: u64,
}

/// Admits iff the source is under capacity, has a route, and the link has
/// at least the reservation left over. Checks run in that order.
pub fn admit_flow(input: &AdmissionInput) -> Admission {
    if input.active_at_src >= input.capacity {
        return Admission::Rejected(RejectReason::Capacity);
    }
    if !input.route_exists {
        return Admission::Rejected(RejectReason::NoRoute);
    }
    let available = (input.link_rate as f64 - input.estimated_use).max(0.0);
    if available < input.reservation as f64 {
        return Admission::Rejected(RejectReason::Bandwidth);
    }
    Admission::Admitted
}
