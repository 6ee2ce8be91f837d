//! Event engine, clock, seeded randomness, mobility and radio.

pub mod engine;
pub mod mobility;
pub mod radio;
pub mod rng;

pub use engine::{Engine, Event, EventId, ScheduleError};
pub use mobility::{advance_mobility, Arena, MobilityParams, NodePosition};
pub use radio::{neighbors_at, Adjacency, LinkModel};
pub use rng::{node_stream, world_stream, SimRng, StreamPurpose};
