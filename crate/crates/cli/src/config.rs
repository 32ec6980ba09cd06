//! Model configuration file.
//!
//! ```json
//! { "transition": [[0.4, 0.25, 0.35], [0.25, 0.45, 0.3], [0.2, 0.55, 0.25]],
//!   "epsilon": [0.01, 0.02],
//!   "log_base": 2 }
//! ```
//!
//! `log_base` is optional and may be `2` or `"e"`.

use std::path::Path;

use entrate_core::{HmpModel, LogBase};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub transition: Vec<Vec<f64>>,
    pub epsilon: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_base: Option<LogBaseSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LogBaseSpec {
    Number(f64),
    Name(String),
}

impl LogBaseSpec {
    pub fn resolve(&self) -> CliResult<LogBase> {
        match self {
            LogBaseSpec::Number(b) if *b == 2.0 => Ok(LogBase::Bits),
            LogBaseSpec::Number(b) if (*b - std::f64::consts::E).abs() < 1e-12 => Ok(LogBase::Nats),
            LogBaseSpec::Name(s) => parse_log_base(s),
            LogBaseSpec::Number(b) => Err(CliError::Invalid(format!(
                "log_base must be 2 or \"e\", got {b}"
            ))),
        }
    }
}

pub fn parse_log_base(s: &str) -> CliResult<LogBase> {
    match s {
        "2" | "bits" => Ok(LogBase::Bits),
        "e" | "nats" => Ok(LogBase::Nats),
        other => Err(CliError::Invalid(format!(
            "log base must be 2 or e, got {other:?}"
        ))),
    }
}

impl ModelConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("model config: {e}")))
    }

    pub fn log_base(&self) -> CliResult<LogBase> {
        self.log_base.as_ref().map_or(Ok(LogBase::Bits), LogBaseSpec::resolve)
    }

    /// Strict model: every entry, noise and invertibility condition enforced.
    pub fn model(&self) -> CliResult<HmpModel> {
        Ok(HmpModel::from_parts(&self.transition, &self.epsilon)?)
    }
}

/// Reads the file, returning the parsed config and the raw bytes.
pub fn load(path: &Path) -> CliResult<(ModelConfig, Vec<u8>)> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((ModelConfig::from_json(text)?, bytes))
}
