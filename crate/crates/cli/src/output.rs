use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// Version tag carried by every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Debug keeps the shortest round-trip digits and switches to
            // exponent form for tiny values
            Cell::Num(x) => format!("{x:?}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A result table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Resolved parameters, echoed into JSON output.
    pub params: Value,
}

impl Table {
    pub fn new(command: &str, columns: &[&str], params: Value) -> Self {
        Self {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            params,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn schema(&self) -> String {
        format!("monopole.{}.v{SCHEMA_VERSION}", self.command.replace('-', "_"))
    }

    /// First non-finite number, as a diagnostic.
    pub fn non_finite(&self) -> Option<String> {
        self.rows.iter().enumerate().find_map(|(i, row)| {
            row.iter().zip(&self.columns).find_map(|(c, name)| match c {
                Cell::Num(x) if !x.is_finite() => Some(format!("column `{name}` of row {i} is {x}")),
                _ => None,
            })
        })
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("schema".into(), Value::from(self.schema()));
        doc.insert("command".into(), Value::from(self.command.as_str()));
        doc.insert("params".into(), self.params.clone());
        doc.insert("columns".into(), Value::from(self.columns.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.into_inner().map_err(|e| CliError::Io(e.to_string()))
            }
            Format::Json => json_bytes(&self.to_json()),
        }
    }
}

/// Pretty JSON with a trailing newline. Object keys come out sorted.
pub fn json_bytes(v: &Value) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
