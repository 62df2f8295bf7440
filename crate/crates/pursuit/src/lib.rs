//! File formats, scenario handling and reporting for the `pursuit` tool.

pub mod error;
pub mod export;
pub mod presets;
pub mod run;
pub mod scenario;
pub mod summary;

pub use error::{Error, Result};
pub use run::{run_scenario, ComparisonReport, RunOutput, Tolerances};
pub use scenario::{load_scenario, parse_scenario, MethodChoice, Overrides, Scenario};
