//! Settings files: `key = value` parsing, unit scaling, and scenario assembly.

mod scenario;
mod table;
pub mod units;

pub use scenario::{
    build_scenario, GroupSpec, InterfaceSpec, MessageGeneratorSpec, MovementSpec, PoiChoice,
    RouterKind, Scenario, ScenarioError, SpeedRange, DEFAULT_HOP_THRESHOLD, DEFAULT_RNG_SEED,
    DEFAULT_UPDATE_INTERVAL,
};
pub use table::{parse_settings, Entry, ParseError, SettingsTable};
pub use units::{real_to_sim, QuantityKind, UnitError};
