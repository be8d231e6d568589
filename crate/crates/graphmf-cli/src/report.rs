//! Deterministic JSON reports: identical inputs and command lines always
//! produce byte-identical report files (no timestamps, ordered keys).

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(path: &Path, text: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        InputDigest {
            path: path.display().to_string(),
            sha256: format!("{:x}", hasher.finalize()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub summary: String,
    pub result: Value,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Report {
    pub fn new(command: &str, inputs: Vec<InputDigest>, result: Value) -> Self {
        Report {
            tool: ToolInfo {
                name: "graphmf".to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            command: command.to_string(),
            inputs,
            summary: String::new(),
            result,
            warnings: Vec::new(),
        }
    }

    pub fn to_pretty_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
