use serde::Serialize;
use sha2::{Digest, Sha256};

/// Envelope printed by every subcommand in `--json` mode.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub args: Vec<String>,
    /// SHA-256 of the input file, or of the canonical parameters when the
    /// command takes no file.
    pub input_digest: String,
    pub exit_code: u8,
    pub elapsed_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    hash.iter().map(|b| format!("{b:02x}")).collect()
}
