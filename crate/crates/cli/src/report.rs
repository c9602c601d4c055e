use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use forestalg::Error;

pub const SCHEMA: u64 = 1;

/// Exit status, text form and JSON form of one command.
#[derive(Debug)]
pub struct Report {
    pub code: u8,
    pub text: String,
    json: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut json = Map::new();
        json.insert("schema".into(), json!(SCHEMA));
        json.insert("command".into(), json!(command));
        Report {
            code: 0,
            text: String::new(),
            json,
        }
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        let _ = writeln!(self.text, "{}", text.as_ref());
    }

    /// A `key: value` text line mirrored in the JSON report.
    pub fn field(&mut self, key: &str, value: impl Into<Value>) {
        let value = value.into();
        let shown = match &value {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        self.line(format!("{key}: {shown}"));
        self.json.insert(key.replace(' ', "_"), value);
    }

    /// JSON only.
    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.json.insert(key.into(), value.into());
    }

    pub fn fail(&mut self) {
        self.code = 1;
    }

    pub fn json_string(&self) -> String {
        let mut json = self.json.clone();
        json.insert("exit_code".into(), json!(self.code));
        serde_json::to_string_pretty(&Value::Object(json)).expect("json")
    }
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::SizeLimit { .. } => 3,
                Error::NotEfAlgebra { .. } | Error::NotKDefinite { .. } | Error::NotNonconfusing { .. } => 1,
                Error::Internal(_) => 4,
                _ => 2,
            };
        }
    }
    2
}

pub fn error_json(err: &anyhow::Error, code: u8) -> String {
    let value = json!({
        "schema": SCHEMA,
        "error": format!("{err:#}"),
        "exit_code": code,
    });
    serde_json::to_string_pretty(&value).expect("json")
}
