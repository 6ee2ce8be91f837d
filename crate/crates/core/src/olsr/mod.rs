//! OLSR control plane: neighbor sensing, MPR selection, MPR flooding,
//! topology maintenance and routing.

pub mod flood;
pub mod messages;
pub mod mpr;
pub mod routes;
pub mod state;

pub use messages::{DecodeError, HelloMessage, LinkStatus, TcMessage};
pub use mpr::{greedy_cover, MprSet};
pub use routes::{shortest_paths, Graph, Route, RoutingTable};
pub use state::{
    BlacklistEntry, BlacklistReason, ControlMessage, HelloError, NodeState, OlsrConfig,
    TopologyTuple,
};
