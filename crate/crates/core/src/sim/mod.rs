//! The discrete-time world: hosts, tick loop, connectivity, transfers and
//! the event stream they produce.

mod events;
mod generator;
mod host;
mod world;

pub use events::{format_event, EventKind, EventLogWriter, EventSink, NullSink, SimEvent, SinkError};
pub use generator::{create_message, MessageGenerator};
pub use host::{pair_mut, Host};
pub use world::{detect_connections, transfer_time, Connection, Environment, Transfer, World, WorldError};
