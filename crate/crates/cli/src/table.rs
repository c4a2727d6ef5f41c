//! Tabular output shared by all subcommands.

use std::io::Write;

use eiwe_core::constants::CODATA_2018;
use serde_json::{json, Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 15 significant digits in scientific notation.
            Cell::Num(v) => format!("{v:.14e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Run parameters echoed into JSON output.
    pub parameters: Value,
    pub passed: bool,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<&'static str>, parameters: Value) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
            parameters,
            passed: true,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()
    }

    fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "command": self.command,
            "constants": CODATA_2018,
            "parameters": self.parameters,
            "columns": self.columns,
            "rows": rows,
            "passed": self.passed,
        });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("test", vec!["a", "b", "flag"], json!({"k": 1}));
        t.push(vec![Cell::Num(1.0 / 3.0), Cell::Missing, Cell::Bool(true)]);
        t.push(vec![Cell::Num(-2.5e-43), Cell::Int(7), Cell::Bool(false)]);
        t
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "a,b,flag");
        assert_eq!(lines[1], "3.33333333333333e-1,,true");
        assert_eq!(lines[2], "-2.50000000000000e-43,7,false");
        let back: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
        assert!((back - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn json_carries_constants() {
        let mut buf = Vec::new();
        sample().write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["constants"]["hbar"], json!(eiwe_core::constants::HBAR));
        assert_eq!(v["rows"][0]["b"], Value::Null);
        assert_eq!(v["rows"][1]["b"], json!(7));
        assert_eq!(v["passed"], json!(true));
    }
}
