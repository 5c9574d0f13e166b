use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input; exit 2.
    Input(String),
    /// Well-formed input that the operation rejects; exit 1.
    Domain { kind: String, message: String },
}

impl CliError {
    pub fn domain(kind: &str, e: impl std::fmt::Display) -> Self {
        CliError::Domain { kind: kind.to_string(), message: e.to_string() }
    }
}

/// What a command hands back: JSON payload, the human-readable lines and
/// the bytes that identify its input.
pub struct Outcome {
    pub result: Value,
    pub text: Vec<String>,
    pub input: Vec<u8>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

pub struct Report {
    command: Vec<String>,
    outcome: Result<Outcome, CliError>,
    elapsed: Duration,
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(command: &[String], outcome: Result<Outcome, CliError>, elapsed: Duration) -> Self {
        Report { command: command.to_vec(), outcome, elapsed }
    }

    fn to_json(&self) -> Value {
        let mut v = serde_json::json!({
            "command": self.command,
            "elapsed_ms": self.elapsed.as_secs_f64() * 1e3,
        });
        match &self.outcome {
            Ok(o) => {
                v["status"] = "ok".into();
                v["input_digest"] = digest(&o.input).into();
                v["result"] = o.result.clone();
                v["warnings"] = serde_json::to_value(&o.warnings).unwrap();
            }
            Err(e) => {
                let (status, kind, message) = match e {
                    CliError::Input(m) => ("malformed-input", "input", m.as_str()),
                    CliError::Domain { kind, message } => ("domain-error", kind.as_str(), message.as_str()),
                };
                v["status"] = status.into();
                v["error"] = serde_json::to_value(ErrorBody { kind, message }).unwrap();
            }
        }
        v
    }

    pub fn emit(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string_pretty(&self.to_json()).unwrap());
            if let Ok(o) = &self.outcome {
                for w in &o.warnings {
                    eprintln!("warning: {w}");
                }
            }
            return;
        }
        match &self.outcome {
            Ok(o) => {
                for w in &o.warnings {
                    eprintln!("warning: {w}");
                }
                for line in &o.text {
                    println!("{line}");
                }
            }
            Err(CliError::Input(m)) => eprintln!("error: malformed input: {m}"),
            Err(CliError::Domain { .. }) => eprintln!("{}", self.to_json()),
        }
    }
}
