use std::path::Path;

use anyhow::Result;
use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
}

/// SHA-256 of the compact JSON rendering with object keys sorted.
pub fn config_hash(config: &Value) -> String {
    // serde_json's default map is ordered by key, so the rendering is canonical.
    let canonical = serde_json::to_string(&canonicalize(config)).expect("JSON values always serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn canonicalize(v: &Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), canonicalize(v))).collect()),
        Value::Array(items) => Value::Array(items.iter().map(canonicalize).collect()),
        other => other.clone(),
    }
}

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(command: &str, config: &Value, seed: Option<u64>, started: String) -> Self {
        Self {
            command: command.to_string(),
            config_hash: config_hash(config),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started,
            finished: now(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        crate::write_file(dir, "manifest.json", &serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"N":2,"g":[0,1],"nested":{"b":1,"a":2}}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"nested":{"a":2,"b":1},"g":[0,1],"N":2}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        let c: Value = serde_json::from_str(r#"{"N":2,"g":[1,0],"nested":{"b":1,"a":2}}"#).unwrap();
        assert_ne!(config_hash(&a), config_hash(&c));
        assert_eq!(config_hash(&a).len(), 64);
    }
}
