//! Scenario files shipped with the binary.

use crate::error::{CliError, Result};
use crate::scenario::Scenario;

pub const SCENARIOS: [(&str, &str); 5] = [
    (
        "sipic1_waveguide_15mm",
        include_str!("../scenarios/sipic1_waveguide_15mm.toml"),
    ),
    ("sipic1_ring", include_str!("../scenarios/sipic1_ring.toml")),
    (
        "sipic1_waveguide_0p24mm",
        include_str!("../scenarios/sipic1_waveguide_0p24mm.toml"),
    ),
    (
        "sipic2_waveguide_15mm",
        include_str!("../scenarios/sipic2_waveguide_15mm.toml"),
    ),
    ("sipic2_ring", include_str!("../scenarios/sipic2_ring.toml")),
];

/// Row order of the source summary table.
pub const TABLE1: [&str; 5] = [
    "sipic1_waveguide_15mm",
    "sipic1_ring",
    "sipic1_waveguide_0p24mm",
    "sipic2_waveguide_15mm",
    "sipic2_ring",
];

pub fn text(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load(name: &str) -> Result<Scenario> {
    let text = text(name).ok_or_else(|| {
        let names: Vec<&str> = SCENARIOS.iter().map(|(n, _)| *n).collect();
        CliError::Config(format!(
            "no bundled scenario `{name}` (available: {})",
            names.join(", ")
        ))
    })?;
    Scenario::from_toml(text, name)
}
