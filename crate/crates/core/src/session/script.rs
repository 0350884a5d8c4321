use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Player input. The whole vocabulary is look, move and select.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Command {
    Look {
        heading: f64,
    },
    /// Holding the button keeps walking until the next `move`.
    Move {
        held: bool,
    },
    /// Without an id, the panel under the current heading is chosen.
    Select {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        action_id: Option<String>,
    },
}

impl Command {
    pub(crate) fn slot(&self) -> usize {
        match self {
            Command::Look { .. } => 0,
            Command::Move { .. } => 1,
            Command::Select { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptLine {
    pub tick: u64,
    pub command: Command,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScriptError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: tick {tick} comes before tick {prev}")]
    OutOfOrder { line: usize, tick: u64, prev: u64 },
}

/// Parses a JSONL input script; ticks must be non-decreasing.
pub fn parse_script(text: &str) -> Result<Vec<ScriptLine>, ScriptError> {
    let mut out: Vec<ScriptLine> = Vec::new();
    for (i, l) in text.lines().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let s: ScriptLine = serde_json::from_str(l).map_err(|e| ScriptError::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        if let Some(prev) = out.last() {
            if s.tick < prev.tick {
                return Err(ScriptError::OutOfOrder {
                    line: i + 1,
                    tick: s.tick,
                    prev: prev.tick,
                });
            }
        }
        out.push(s);
    }
    Ok(out)
}

pub fn script_to_jsonl(lines: &[ScriptLine]) -> String {
    let mut s = String::new();
    for l in lines {
        s.push_str(&serde_json::to_string(l).expect("serializable"));
        s.push('\n');
    }
    s
}
