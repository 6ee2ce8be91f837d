//! Reliable transport with New Reno congestion control.

pub mod flow;
pub mod newreno;

pub use flow::{segment_payload, CwndSample, FlowReceiver, FlowSender, FlowSpec, TrafficKind};
pub use newreno::{AckEvent, AckOutcome, CcVariant, CwndState, Phase};
