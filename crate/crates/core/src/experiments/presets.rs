//! Built-in experiments, stored as the same TOML a user would write.

use std::path::Path;

use crate::error::{Error, Result};

use super::config::ExperimentConfig;

pub struct Preset {
    pub name: &'static str,
    /// Other names accepted by [`find_preset`].
    pub aliases: &'static [&'static str],
    pub text: &'static str,
}

impl Preset {
    pub fn config(&self) -> Result<ExperimentConfig> {
        ExperimentConfig::from_toml_str(self.text)
    }

    /// The `description` line of the preset.
    pub fn summary(&self) -> String {
        self.config().map(|c| c.description).unwrap_or_default()
    }
}

macro_rules! preset {
    ($name:literal $(, $alias:literal)*) => {
        Preset {
            name: $name,
            aliases: &[$($alias),*],
            text: include_str!(concat!("../../presets/", $name, ".toml")),
        }
    };
}

static PRESETS: &[Preset] = &[
    preset!("table1"),
    preset!("table2"),
    preset!("table3"),
    preset!("table4"),
    preset!("example1"),
    preset!("example1-ou"),
    preset!("example2"),
    preset!("linear-fgn"),
    preset!("linear-fgn-b0"),
    preset!("linear-tv", "fig6"),
    preset!("nonlinear-fgn", "fig7"),
    preset!("fgn-only"),
    preset!("hurst-sweep"),
    preset!("hurst-sweep-nonlinear"),
];

pub fn list_presets() -> &'static [Preset] {
    PRESETS
}

pub fn find_preset(name: &str) -> Option<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name || p.aliases.contains(&name))
}

/// The TOML of a preset, for `describe`.
pub fn describe(name: &str) -> Result<String> {
    find_preset(name)
        .map(|p| p.text.to_string())
        .ok_or_else(|| unknown(name))
}

fn unknown(name: &str) -> Error {
    let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
    Error::config(
        "<preset>",
        format!(
            "no preset or file named `{name}` (presets: {})",
            names.join(", ")
        ),
    )
}

/// Resolves a preset name or a path to a TOML file.
pub fn load(spec: &str) -> Result<ExperimentConfig> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return ExperimentConfig::from_toml_str(&text);
    }
    find_preset(spec).ok_or_else(|| unknown(spec))?.config()
}
