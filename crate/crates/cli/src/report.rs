use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub struct Report {
    pub command: Vec<String>,
    pub inputs: Vec<Value>,
    pub results: Value,
    pub text: String,
}

impl Report {
    /// Pretty JSON with keys in lexicographic order.
    pub fn to_json(&self) -> String {
        let v = json!({
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
        });
        serde_json::to_string_pretty(&v).expect("json value serializes")
    }
}

/// Reads a file and records its path and SHA-256.
pub fn read_input(path: &Path, inputs: &mut Vec<Value>) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    inputs.push(json!({
        "path": path.display().to_string(),
        "sha256": hex::encode(Sha256::digest(&bytes)),
    }));
    String::from_utf8(bytes).map_err(|e| {
        CliError::Io(
            path.to_path_buf(),
            std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        )
    })
}

pub fn write_output(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(path.clone(), e))
}
