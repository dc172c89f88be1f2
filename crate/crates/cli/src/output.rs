//! Tabular reports rendered as CSV with a JSON manifest line, or as JSON.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;

pub const TOOL: &str = "ngforge";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Column-major description plus row data.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Values of one column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Output of one command: the echoed configuration, scalar results and a table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Map<String, Value>,
    pub table: Table,
}

impl Report {
    pub fn new(command: &str, config: impl Serialize, table: Table) -> Self {
        Report {
            command: command.to_string(),
            config: serde_json::to_value(config).expect("config serializes"),
            results: Map::new(),
            table,
        }
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results
            .insert(key.to_string(), serde_json::to_value(value).expect("result serializes"));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.results.get(key)
    }

    fn manifest(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "results": self.results,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(&self.manifest().to_string());
        out.push('\n');
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("tool".into(), json!(TOOL));
        obj.insert("version".into(), json!(VERSION));
        obj.insert("command".into(), json!(self.command));
        obj.insert("config".into(), self.config.clone());
        for (k, v) in &self.results {
            obj.insert(k.clone(), v.clone());
        }
        obj.insert("columns".into(), json!(self.table.columns));
        let rows: Vec<Value> = self.table.rows.iter().map(|r| json!(r.iter().map(|&v| finite_or_null(v)).collect::<Vec<_>>())).collect();
        obj.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Splits CSV output into its manifest and numeric rows.
pub fn parse_csv(text: &str) -> Option<(Value, Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let manifest: Value = serde_json::from_str(lines.next()?.strip_prefix("# ")?).ok()?;
    let columns = lines.next()?.split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .ok()?;
    Some((manifest, columns, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![0.1, -2.0]);
        t.push(vec![1e-20, f64::NAN]);
        let mut r = Report::new("demo", json!({"s": 1.5}), t);
        r.result("p", 0.25);
        r
    }

    #[test]
    fn csv_round_trip() {
        let text = sample().to_csv();
        assert!(text.starts_with("# {"));
        let (manifest, cols, rows) = parse_csv(&text).unwrap();
        assert_eq!(manifest["command"], "demo");
        assert_eq!(manifest["config"]["s"], 1.5);
        assert_eq!(manifest["results"]["p"], 0.25);
        assert_eq!(cols, vec!["x", "y"]);
        assert_eq!(rows[0], vec![0.1, -2.0]);
        assert_eq!(rows[1][0], 1e-20);
        assert!(rows[1][1].is_nan());
    }

    #[test]
    fn json_is_flat_and_stable() {
        let a = sample().to_json();
        assert_eq!(a, sample().to_json());
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["p"], 0.25);
        assert_eq!(v["columns"][1], "y");
        assert!(v["rows"][1][1].is_null());
    }

    #[test]
    fn column_lookup() {
        let r = sample();
        assert_eq!(r.table.column("x").unwrap(), vec![0.1, 1e-20]);
        assert!(r.table.column("z").is_none());
    }
}
