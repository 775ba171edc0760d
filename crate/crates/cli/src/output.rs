use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: &'static str,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Envelope {
    pub fn new(command: &'static str, inputs: Map<String, Value>) -> Self {
        Self {
            command,
            inputs,
            results: Map::new(),
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
        }
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }
}

/// Builds a JSON object from `(key, value)` pairs, keeping their order.
#[macro_export]
macro_rules! object {
    ($($key:expr => $value:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut map = serde_json::Map::new();
        $(map.insert(String::from($key), serde_json::Value::from($value));)*
        map
    }};
}

/// Flattens nested objects into `parent.child` keys.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

pub fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn write_envelope(
    env: &Envelope,
    format: Format,
    out: &mut impl Write,
) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, env)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut flat = Vec::new();
            flatten("", &Value::Object(env.results.clone()), &mut flat);
            let mut w = csv::Writer::from_writer(out);
            w.write_record(flat.iter().map(|(k, _)| k))?;
            w.write_record(flat.iter().map(|(_, v)| v))?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Writes `rows` as CSV with `columns` as the header, or as a JSON array.
pub fn write_table(
    columns: &[&str],
    rows: &[Map<String, Value>],
    format: Format,
    out: &mut impl Write,
) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(columns)?;
            for row in rows {
                w.write_record(
                    columns
                        .iter()
                        .map(|c| row.get(*c).map(cell).unwrap_or_default()),
                )?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
