//! Built-in scenarios, embedded at compile time.

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::export::write_text;
use crate::scenario::{parse_scenario, Scenario};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub json: &'static str,
}

macro_rules! preset {
    ($name:literal, $summary:literal) => {
        Preset {
            name: $name,
            summary: $summary,
            json: include_str!(concat!("../presets/", $name, ".json")),
        }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!("example1", "autonomous gathering, 20 degrees"),
    preset!("example2", "autonomous gathering, 20 degrees, second start"),
    preset!("case-1.1", "all agents led, 20 degrees"),
    preset!("case-1.2", "agents 2 and 5 led, 20 degrees"),
    preset!("case-2.1", "all agents led, critical angle"),
    preset!("case-2.2", "agents 2 and 5 led, critical angle"),
    preset!("case-m1", "two-interval switch at t = 45"),
    preset!("case-m2", "three-interval switch at t = 45 and 52.5"),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Parses a named preset.
///
/// # Panics
/// If `name` is unknown.
pub fn load(name: &str) -> Scenario {
    let p = find(name).unwrap_or_else(|| panic!("no preset named {name}"));
    parse_scenario(p.json).expect("embedded presets are valid")
}

/// Writes every preset as `<name>.json` into `dir`.
pub fn write_all(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| crate::error::Error::Write {
        path: dir.to_owned(),
        source,
    })?;
    PRESETS
        .iter()
        .map(|p| {
            let path = dir.join(format!("{}.json", p.name));
            write_text(&path, p.json.trim_end())?;
            Ok(path)
        })
        .collect()
}
