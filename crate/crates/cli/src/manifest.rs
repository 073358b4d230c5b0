use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub germ_source: Option<String>,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, germ_source: Option<String>, parameters: BTreeMap<String, Value>, seed: u64) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        RunManifest {
            command: command.into(),
            germ_source,
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp,
        }
    }

    /// SHA-256 over the canonical JSON of every field except the timestamp.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        if let Value::Object(m) = &mut v {
            m.remove("timestamp");
        }
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        v["manifest_hash"] = Value::String(self.hash());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_timestamp() {
        let mut p = BTreeMap::new();
        p.insert("epsilon".to_string(), Value::from(0.01));
        let a = RunManifest::new("flower", Some("g.json".into()), p.clone(), 7);
        let mut b = a.clone();
        b.timestamp += 1000;
        assert_eq!(a.hash(), b.hash());
        let c = RunManifest::new("flower", Some("g.json".into()), p, 8);
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
