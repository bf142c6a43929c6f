//! The header line that opens every output file.
//!
//! `# advmt <version> command=<name> seed=<seed> config=sha256:<hex> settings=<json>`
//!
//! The settings echo and digest leave out output paths and the thread count,
//! neither of which changes results, so equivalent runs share a digest.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Settings keys that do not change results.
const IGNORED_KEYS: &[&str] = &["out", "csv", "loss_csv", "threads"];

pub const PREFIX: &str = "# advmt ";

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub seed: u64,
    pub settings: Value,
}

fn strip_ignored(v: &mut Value) {
    if let Value::Object(map) = v {
        for k in IGNORED_KEYS {
            map.remove(*k);
        }
    }
}

impl Manifest {
    pub fn new(command: &str, seed: u64, settings: &impl Serialize) -> Self {
        let mut settings = serde_json::to_value(settings).expect("settings serialize");
        strip_ignored(&mut settings);
        Manifest {
            command: command.to_string(),
            seed,
            settings,
        }
    }

    pub fn digest(&self) -> String {
        // serde_json maps are ordered, so this rendering is canonical.
        let canonical = serde_json::to_string(&self.settings).expect("json value");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn line(&self) -> String {
        format!(
            "{PREFIX}{} command={} seed={} config=sha256:{} settings={}",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.seed,
            self.digest(),
            self.settings
        )
    }

    /// Parses the first line of `text` if it is a manifest.
    pub fn parse(text: &str) -> Option<Manifest> {
        let line = text.lines().next()?.strip_prefix(PREFIX)?;
        let (head, settings) = line.split_once(" settings=")?;
        let mut fields = head.split(' ').skip(1);
        let command = fields.next()?.strip_prefix("command=")?.to_string();
        let seed = fields.next()?.strip_prefix("seed=")?.parse().ok()?;
        let settings = serde_json::from_str(settings).ok()?;
        Some(Manifest {
            command,
            seed,
            settings,
        })
    }

    /// Prepends the manifest line to `body`.
    pub fn wrap(&self, body: &str) -> String {
        let mut out = self.line();
        out.push('\n');
        out.push_str(body);
        out
    }
}
