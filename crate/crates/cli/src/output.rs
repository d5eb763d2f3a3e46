//! Output rendering: the same values in plain text, CSV or JSON.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    /// Key-value lines / aligned columns.
    #[default]
    Plain,
    /// Comma-separated with a header row.
    Csv,
    /// A single JSON document.
    Json,
}

/// Rounds to the fixed 6-decimal output precision, normalizing -0.
pub fn round6(v: f64) -> f64 {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// The fixed 6-decimal rendering used for rates, bounds and ARs.
pub fn fmt6(v: f64) -> String {
    format!("{:.6}", round6(v))
}

/// One field of a key-value document.
#[derive(Debug, Clone)]
pub enum Field {
    Count(usize),
    /// Rendered with 6 decimals.
    Rate(f64),
    /// Full-precision number (shortest round-trip rendering).
    Number(f64),
    Flag(bool),
    Text(String),
    /// Present in every format, rendered as unavailable/null.
    Missing,
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Count(n) => n.to_string(),
            Field::Rate(v) => fmt6(*v),
            Field::Number(v) => v.to_string(),
            Field::Flag(b) => b.to_string(),
            Field::Text(s) => s.clone(),
            Field::Missing => "unavailable".to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Field::Count(n) => json!(n),
            Field::Rate(v) => json!(round6(*v)),
            Field::Number(v) => json!(v),
            Field::Flag(b) => json!(b),
            Field::Text(s) => json!(s),
            Field::Missing => Value::Null,
        }
    }
}

/// A key-value document with optional repeated trailing entries
/// (verdicts, violations).
#[derive(Debug, Default)]
pub struct Document {
    fields: Vec<(&'static str, Field)>,
    lists: Vec<(&'static str, Vec<Value>, Vec<String>)>,
}

impl Document {
    pub fn field(mut self, key: &'static str, value: Field) -> Self {
        self.fields.push((key, value));
        self
    }

    /// Adds a named list; `rendered` carries the plain/CSV line per item
    /// and `structured` the JSON value per item.
    pub fn list(
        mut self,
        key: &'static str,
        structured: Vec<Value>,
        rendered: Vec<String>,
    ) -> Self {
        self.lists.push((key, structured, rendered));
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Plain => {
                let mut out = String::new();
                for (key, value) in &self.fields {
                    let _ = writeln!(out, "{key}: {}", value.render());
                }
                for (key, _, rendered) in &self.lists {
                    for item in rendered {
                        let _ = writeln!(out, "{key}: {item}");
                    }
                }
                out
            }
            OutputFormat::Csv => {
                let mut out = String::from("key,value\n");
                for (key, value) in &self.fields {
                    let _ = writeln!(out, "{key},{}", csv_quote(&value.render()));
                }
                for (key, _, rendered) in &self.lists {
                    for item in rendered {
                        let _ = writeln!(out, "{key},{}", csv_quote(item));
                    }
                }
                out
            }
            OutputFormat::Json => {
                let mut map = serde_json::Map::new();
                for (key, value) in &self.fields {
                    map.insert((*key).to_string(), value.to_json());
                }
                for (key, structured, _) in &self.lists {
                    map.insert((*key).to_string(), Value::Array(structured.clone()));
                }
                let mut out =
                    serde_json::to_string_pretty(&Value::Object(map)).expect("document serializes");
                out.push('\n');
                out
            }
        }
    }
}

/// A rectangular table of already-rendered cells.
#[derive(Debug)]
pub struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            // Tables are emitted as CSV in plain mode too: the repro
            // outputs are meant to be piped into files or plotting tools.
            OutputFormat::Plain | OutputFormat::Csv => {
                let mut out = self.headers.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut map = serde_json::Map::new();
                        for (header, cell) in self.headers.iter().zip(row) {
                            let value = cell
                                .parse::<f64>()
                                .map(|v| json!(v))
                                .unwrap_or_else(|_| json!(cell));
                            map.insert((*header).to_string(), value);
                        }
                        Value::Object(map)
                    })
                    .collect();
                let mut out =
                    serde_json::to_string_pretty(&Value::Array(rows)).expect("table serializes");
                out.push('\n');
                out
            }
        }
    }
}

fn csv_quote(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}
