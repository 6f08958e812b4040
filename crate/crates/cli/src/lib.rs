//! Scenario runner for the hodograph pipeline: reads a TOML scenario, runs
//! domain → `v` → `Θ` → `u` → reflection → ledger, and writes a JSON report,
//! CSV tables and an SVG figure.

pub mod config;
pub mod figure;
pub mod output;
pub mod pipeline;
pub mod report;

pub use config::ScenarioConfig;
pub use pipeline::{run_scenario, Mode, Run};

/// Worker count for the thread pool; unset means one per core.
pub const WORKERS_ENV: &str = "HODOGRAPH_WORKERS";

/// Bundled scenario files, by name.
pub const SCENARIOS: [(&str, &str); 4] = [
    ("halfdisk-identity", include_str!("../scenarios/halfdisk-identity.toml")),
    ("halfdisk-cubic", include_str!("../scenarios/halfdisk-cubic.toml")),
    ("dmo-theorem12", include_str!("../scenarios/dmo-theorem12.toml")),
    ("square-corner", include_str!("../scenarios/square-corner.toml")),
];

pub fn bundled(name: &str) -> Option<ScenarioConfig> {
    SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ScenarioConfig::parse(text).expect("bundled scenarios are valid"))
}
