//! Settings resolution: built-in defaults, then the command's table in the
//! `--config` TOML file, then command-line flags.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// A failed command, split by exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, configuration or input files. Exit status 2.
    Usage(String),
    /// Numeric or output failure while running. Exit status 1.
    Runtime(String),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        Failure::Runtime(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<advmt::Error> for Failure {
    fn from(e: advmt::Error) -> Self {
        if e.is_input_error() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Drops nulls and empty arrays, which stand for flags that were not given.
fn prune(v: Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.into_iter()
                .filter(|(_, v)| !v.is_null() && v.as_array().is_none_or(|a| !a.is_empty()))
                .map(|(k, v)| (k, prune(v)))
                .collect(),
        ),
        other => other,
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// The table at `section` (e.g. `["annotate", "export"]`) of a TOML file.
fn config_table(path: &Path, section: &[&str]) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let mut value = serde_json::to_value(table).map_err(|e| Failure::usage(e.to_string()))?;
    for key in section {
        value = match value {
            Value::Object(mut map) => map.remove(*key).unwrap_or(Value::Object(Map::new())),
            _ => {
                return Err(Failure::usage(format!(
                    "{}: [{}] is not a table",
                    path.display(),
                    section.join(".")
                )))
            }
        };
    }
    if !value.is_object() {
        return Err(Failure::usage(format!(
            "{}: [{}] is not a table",
            path.display(),
            section.join(".")
        )));
    }
    Ok(value)
}

/// Resolves settings for the command at `section`.
pub fn resolve<T: Default + Serialize + DeserializeOwned>(
    section: &[&str],
    config: Option<&Path>,
    flags: &impl Serialize,
) -> CliResult<T> {
    let mut value = serde_json::to_value(T::default()).expect("defaults serialize");
    if let Some(path) = config {
        merge(&mut value, config_table(path, section)?);
    }
    merge(&mut value, prune(serde_json::to_value(flags).expect("flags serialize")));
    let name = section.join(" ");
    serde_json::from_value(value).map_err(|e| Failure::usage(format!("{name} settings: {e}")))
}
