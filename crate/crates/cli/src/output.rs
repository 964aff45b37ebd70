//! Table emission. Both formats carry the same metadata block so an emitted
//! file names the command and full parameter set that produced it.

use std::io::Write;
use std::path::Path;

use crate::config::CliError;

pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Flag(bool),
}

pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            metadata: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest decimal form that parses back to the same float. Used for
/// metadata values so round-tripping a header reproduces the run exactly.
pub fn float_repr(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => {
            if v.is_finite() {
                format!("{v:.16e}")
            } else {
                float_repr(*v)
            }
        }
        Cell::Text(s) => s.clone(),
        Cell::Flag(b) => b.to_string(),
    }
}

pub fn render_csv(table: &Table) -> String {
    let mut out = String::new();
    for (k, v) in &table.metadata {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(csv_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json_value(cell: &Cell) -> serde_json::Value {
    match cell {
        Cell::Int(v) => serde_json::json!(v),
        Cell::Float(v) => {
            if v.is_finite() {
                serde_json::json!(v)
            } else {
                serde_json::Value::Null
            }
        }
        Cell::Text(s) => serde_json::json!(s),
        Cell::Flag(b) => serde_json::json!(b),
    }
}

pub fn render_json(table: &Table) -> String {
    let metadata: serde_json::Map<String, serde_json::Value> = table
        .metadata
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::json!(v)))
        .collect();
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| serde_json::Value::Array(row.iter().map(json_value).collect()))
        .collect();
    let doc = serde_json::json!({
        "metadata": metadata,
        "columns": table.columns,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
    text.push('\n');
    text
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
