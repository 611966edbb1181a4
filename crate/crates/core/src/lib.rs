//! Deterministic simulator for opportunistic store-carry-forward networks:
//! map-based mobility, Epidemic and MaxProp routing, message statistics and
//! parameter sweeps.

pub mod batch;
pub mod geo;
pub mod metrics;
pub mod mobility;
pub mod rng;
pub mod routing;
pub mod settings;
pub mod sim;
