//! Figure presets, loaded from the bundled `presets.toml`.

use toml::{Table, Value};

use crate::config::RawConfig;
use crate::error::CliError;

const PRESETS: &str = include_str!("presets.toml");

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub command: String,
    pub description: String,
    pub settings: Vec<(String, String)>,
}

impl Preset {
    pub fn apply(&self, raw: &mut RawConfig) -> Result<(), CliError> {
        for (k, v) in &self.settings {
            raw.set(k, v)?;
        }
        Ok(())
    }
}

fn value_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Float(f) => Some(format!("{f:?}")),
        Value::Integer(i) => Some(i.to_string()),
        Value::Boolean(b) => Some(b.to_string()),
        _ => None,
    }
}

pub fn all() -> Vec<Preset> {
    let table: Table = PRESETS.parse().expect("bundled presets parse");
    table
        .into_iter()
        .map(|(name, body)| {
            let body = body.as_table().expect("preset is a table").clone();
            let text = |k: &str| body.get(k).and_then(Value::as_str).unwrap_or_default().to_string();
            let settings = body
                .iter()
                .filter(|(k, _)| !matches!(k.as_str(), "command" | "description"))
                .map(|(k, v)| (k.clone(), value_text(v).expect("scalar preset value")))
                .collect();
            Preset { command: text("command"), description: text("description"), name, settings }
        })
        .collect()
}

pub fn find(name: &str) -> Result<Preset, CliError> {
    let presets = all();
    let names: Vec<&str> = presets.iter().map(|p| p.name.as_str()).collect();
    let known = names.join(", ");
    presets
        .iter()
        .find(|p| p.name == name)
        .cloned()
        .ok_or_else(|| CliError::Usage(format!("unknown preset '{name}' (known: {known})")))
}
