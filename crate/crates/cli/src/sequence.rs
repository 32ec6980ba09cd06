//! Observation sequence files.
//!
//! Three layouts are accepted and told apart by the first non-blank byte:
//!
//! - `[` a JSON array of symbols, `[0, 2, 1, 0]`;
//! - `{` a JSON object `{"symbols": [...], "states": [...]}` as written by
//!   `generate --with-states`;
//! - anything else: one integer per line, blank lines ignored.

use std::path::Path;

use entrate_core::ObservationSequence;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WithStates {
    symbols: Vec<usize>,
    #[serde(default)]
    states: Option<Vec<usize>>,
}

/// Parsed file contents before the alphabet is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSequence {
    pub symbols: Vec<usize>,
    pub states: Option<Vec<usize>>,
}

impl RawSequence {
    /// Smallest alphabet that contains every symbol (at least 2).
    pub fn inferred_q(&self) -> usize {
        self.symbols.iter().max().map_or(2, |&m| (m + 1).max(2))
    }

    pub fn into_observations(self, q: usize) -> CliResult<ObservationSequence> {
        let seq = match self.states {
            Some(states) => ObservationSequence::with_states(self.symbols, states, q),
            None => ObservationSequence::new(self.symbols, q),
        };
        // out-of-range symbols are a property of the file, not the model
        seq.map_err(|e| CliError::Input(format!("sequence: {e}")))
    }
}

pub fn parse(text: &str) -> CliResult<RawSequence> {
    let trimmed = text.trim_start();
    let bad = |e: serde_json::Error| CliError::Input(format!("sequence: {e}"));
    let raw = match trimmed.as_bytes().first() {
        Some(b'[') => RawSequence {
            symbols: serde_json::from_str(trimmed).map_err(bad)?,
            states: None,
        },
        Some(b'{') => {
            let w: WithStates = serde_json::from_str(trimmed).map_err(bad)?;
            RawSequence {
                symbols: w.symbols,
                states: w.states,
            }
        }
        _ => {
            let mut symbols = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let s = line.parse::<usize>().map_err(|e| {
                    CliError::Input(format!("sequence line {}: {line:?}: {e}", i + 1))
                })?;
                symbols.push(s);
            }
            RawSequence { symbols, states: None }
        }
    };
    if raw.symbols.is_empty() {
        return Err(CliError::Input("sequence: no symbols".into()));
    }
    Ok(raw)
}

pub fn load(path: &Path) -> CliResult<(RawSequence, Vec<u8>)> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((parse(text)?, bytes))
}

/// Serialises a sequence in the layout `parse` reads back. States are
/// written only when requested and present.
pub fn render(seq: &ObservationSequence, with_states: bool) -> String {
    let mut out = match (with_states, seq.states()) {
        (true, Some(states)) => serde_json::to_string(&WithStates {
            symbols: seq.symbols().to_vec(),
            states: Some(states.to_vec()),
        }),
        _ => serde_json::to_string(seq.symbols()),
    }
    .expect("integer vectors always serialise");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_layout() {
        assert_eq!(parse("[0, 1, 2]").unwrap().symbols, vec![0, 1, 2]);
        assert_eq!(parse("\n0\n1\n\n2\n").unwrap().symbols, vec![0, 1, 2]);
        let r = parse(r#"{"symbols": [0, 1], "states": [2, 1]}"#).unwrap();
        assert_eq!(r.states, Some(vec![2, 1]));
    }

    #[test]
    fn rejects_garbage() {
        for text in ["", "[]", "[0, -1]", "0\nx\n", "{\"symbols\": [0], \"extra\": 1}", "[0, 1.5]"] {
            assert!(matches!(parse(text), Err(CliError::Input(_))), "{text:?}");
        }
    }

    #[test]
    fn range_checked_against_alphabet() {
        let r = parse("[0, 3]").unwrap();
        assert_eq!(r.inferred_q(), 4);
        assert!(matches!(r.into_observations(3), Err(CliError::Input(_))));
    }

    #[test]
    fn render_round_trips() {
        let seq = ObservationSequence::with_states(vec![0, 2, 1], vec![2, 2, 1], 3).unwrap();
        let back = parse(&render(&seq, true)).unwrap().into_observations(3).unwrap();
        assert_eq!(back, seq);
        let plain = parse(&render(&seq, false)).unwrap();
        assert_eq!(plain.states, None);
        assert_eq!(plain.symbols, seq.symbols());
    }
}
