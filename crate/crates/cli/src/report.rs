use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use matchwidth::cwexpr::Position;
use matchwidth::Error;

/// A failed command: exit code plus a JSON error object.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub body: Value,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body["message"].as_str().unwrap_or("error"))
    }
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            body: json!({"kind": "input", "message": message.into()}),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Failure {
        Failure::input(format!("cannot read {}: {e}", path.display()))
    }

    /// Library error, with the source position of the offending node when known.
    pub fn lib(e: Error, positions: Option<&[Position]>) -> Failure {
        let message = e.to_string();
        let (code, mut body) = match &e {
            Error::Input(_) => (2, json!({"kind": "input"})),
            Error::Parse { line, column, .. } => {
                (2, json!({"kind": "parse", "line": line, "column": column}))
            }
            Error::Redundant { node, i, j, existing, possible }
            | Error::PartialRedundancy { node, i, j, existing, possible } => {
                let kind = if matches!(e, Error::Redundant { .. }) {
                    "redundant-join"
                } else {
                    "partially-redundant-join"
                };
                let mut b = json!({
                    "kind": kind, "node": node, "i": i, "j": j,
                    "existing": existing, "possible": possible,
                });
                if let Some(p) = positions.and_then(|ps| ps.get(*node)) {
                    b["line"] = json!(p.line);
                    b["column"] = json!(p.column);
                }
                (2, b)
            }
            Error::Limit(_) => (3, json!({"kind": "limit"})),
            Error::Internal(_) => (1, json!({"kind": "internal"})),
        };
        body["message"] = json!(message);
        Failure { code, body }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::lib(e, None)
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Reads a UTF-8 input file and records its digest.
pub fn read_input(path: &Path, inputs: &mut Vec<InputDigest>) -> CmdResult<String> {
    let bytes = std::fs::read(path).map_err(|e| Failure::io(path, e))?;
    inputs.push(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    });
    String::from_utf8(bytes).map_err(|_| Failure::input(format!("{} is not UTF-8", path.display())))
}

/// Answer fields at top level, then `run`, then `perf`.
pub struct Report {
    pub answer: Map<String, Value>,
    pub run: Value,
    pub perf: Option<Value>,
}

impl Report {
    pub fn to_value(&self) -> Value {
        let mut m = self.answer.clone();
        m.insert("run".into(), self.run.clone());
        if let Some(p) = &self.perf {
            m.insert("perf".into(), p.clone());
        }
        Value::Object(m)
    }
}

pub fn to_map(v: impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(v).expect("answer serializes") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

pub fn write_json(v: &Value, indent: Option<usize>, out: &mut impl Write) -> std::io::Result<()> {
    match indent {
        None => serde_json::to_writer(&mut *out, v)?,
        Some(k) => {
            let pad = vec![b' '; k];
            let fmt = serde_json::ser::PrettyFormatter::with_indent(&pad);
            let mut ser = serde_json::Serializer::with_formatter(&mut *out, fmt);
            v.serialize(&mut ser).map_err(std::io::Error::other)?;
        }
    }
    out.write_all(b"\n")
}
