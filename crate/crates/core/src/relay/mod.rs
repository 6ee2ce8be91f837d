//! Alternate-relay duplicate delivery, destination reconciliation and the
//! honeypot isolation of unauthenticated nodes.

pub mod honeypot;
pub mod ingest;
pub mod plan;

pub use honeypot::honeypot_blacklist;
pub use ingest::{Expired, IngestOutcome, Reassembly, ReassemblyEntry, DEFAULT_HOLD};
pub use plan::{plan_relay, RelayError, RelayPlan};
