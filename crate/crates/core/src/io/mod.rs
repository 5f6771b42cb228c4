//! File formats: scenario files, binary field dumps and CSV.

pub mod csv;
pub mod dump;
pub mod fields;
pub mod scenario_file;

pub use dump::{fnv1a64, FieldDump, MAGIC};
pub use fields::{pressure_dump, snapshot_dump, temperature_dump, trajectory_from_dumps, velocity_dump};
pub use scenario_file::{load_scenario, parse_scenario, parse_scenario_unchecked, serialize_scenario};
