use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;

/// Version of every JSON document the CLI writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    pub input_digest: String,
    pub parameters: Value,
    pub input: Value,
    pub result: Value,
    pub timing_ms: f64,
}

/// Hash of the labelled input files, in order.
#[derive(Default)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.0.update((label.len() as u64).to_le_bytes());
        self.0.update(label.as_bytes());
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn finish(self) -> String {
        format!("sha256:{}", hex::encode(self.0.finalize()))
    }
}

/// Process exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DimensionCapExceeded { .. } | Error::PairCapExceeded { .. } => 3,
        Error::NoContraction { .. } => 4,
        Error::MaxItersExceeded(_) | Error::NoConvergence(_) => 1,
        _ => 2,
    }
}

pub fn error_json(
    command: &str,
    kind: &str,
    message: &str,
    code: i32,
    partial: Option<Value>,
) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "error": {
            "kind": kind,
            "message": message,
            "exit_code": code,
        }
    });
    if let Some(p) = partial {
        v["partial"] = p;
    }
    v
}

/// True if every number reachable from `v` is finite.
pub fn all_finite(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(a) => a.iter().all(all_finite),
        Value::Object(o) => o.values().all(all_finite),
        _ => true,
    }
}
