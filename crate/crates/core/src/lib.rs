//! Deterministic discrete-event simulator of a secured, QoS-aware MANET stack.
//!
//! The stack is layered the way the simulated nodes see it:
//!
//! * [`kernel`]: event engine, simulated clock, seeded RNG sub-streams,
//!   random-waypoint mobility and the unit-disk radio model.
//! * [`olsr`]: HELLO/TC processing, MPR selection, MPR-restricted flooding and
//!   hop-count routing with a per-node blacklist.
//! * [`crypto`]: AES-128 and the counter-mode + CBC-MAC packet sealing built on it.
//! * [`relay`]: alternate-relay planning, destination-side reconciliation of
//!   duplicate copies and the fake-HELLO isolation of unauthenticated nodes.
//! * [`transport`]: New Reno congestion control and the reliable flows on top.
//! * [`queue`]: strict-priority drop-tail outbound queues and bandwidth estimation.
//! * [`attacks`]: injectable attacker behaviors.
//! * [`scenario`], [`admission`], [`metrics`]: scenario files, admission
//!   control and the QoS report.
//! * [`sim`]: the world that wires all of the above into one event loop.
//! * [`sweep`]: seed sweeps and batch evaluation, parallel under the
//!   `parallel` feature.

pub mod admission;
pub mod attacks;
pub mod crypto;
pub mod kernel;
pub mod metrics;
pub mod olsr;
pub mod packet;
pub mod queue;
pub mod relay;
pub mod scenario;
pub mod sim;
pub mod sweep;
pub mod transport;

mod ids;
mod time;

pub use ids::{FlowId, NodeId};
pub use time::SimTime;
