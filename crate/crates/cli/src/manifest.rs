use std::collections::BTreeMap;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance of one invocation.
///
/// The digest covers everything except timestamps and output digests, so a
/// repeated run produces the same digest and byte-identical artifacts.
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub started: String,
    pub finished: Option<String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(command_line: Vec<String>) -> Self {
        RunManifest {
            command_line,
            config: Value::Null,
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: now(),
            finished: None,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.insert(path.display().to_string(), sha256_hex(bytes));
    }

    fn stable_part(&self) -> Value {
        json!({
            "command_line": self.command_line,
            "config": self.config,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "inputs": self.inputs,
        })
    }

    pub fn digest(&self) -> String {
        sha256_hex(serde_json::to_string(&self.stable_part()).expect("manifest serializes").as_bytes())
    }

    pub fn finish(&mut self) {
        self.finished = Some(now());
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.stable_part();
        let m = v.as_object_mut().expect("object");
        m.insert("digest".into(), json!(self.digest()));
        m.insert("started".into(), json!(self.started));
        m.insert("finished".into(), json!(self.finished));
        m.insert("outputs".into(), json!(self.outputs));
        v
    }
}
