//! Tables written as CSV or JSON.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    /// Written with 12 significant digits; NaN becomes an empty cell.
    Num(f64),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => format_number(*v),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => json!(i),
            Cell::Num(v) if v.is_finite() => json!(round_sig(*v)),
            Cell::Num(_) => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra top-level entries of the JSON document.
    pub extras: Map<String, Value>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), extras: Map::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<(), Failure> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<(), Failure> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Failure::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(io)?;
        }
        w.flush().map_err(|e| Failure::Io(e.to_string()))
    }

    fn write_json<W: Write>(&self, mut out: W) -> Result<(), Failure> {
        let mut doc = Map::new();
        doc.insert("columns".into(), json!(self.columns));
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::to_json).collect())).collect();
        doc.insert("rows".into(), Value::Array(rows));
        for (k, v) in &self.extras {
            doc.insert(k.clone(), v.clone());
        }
        serde_json::to_writer_pretty(&mut out, &Value::Object(doc)).map_err(|e| Failure::Io(e.to_string()))?;
        writeln!(out).map_err(|e| Failure::Io(e.to_string()))
    }
}

/// Round to 12 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

/// 12 significant digits in the shortest form that parses back to the same
/// rounded value; NaN is the empty string.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return String::new();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let r = round_sig(v);
    if (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-2.0 / 3.0 * 1e-80), "-6.66666666667e-81");
        assert_eq!(format_number(f64::NAN), "");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(123456.0), "123456");
    }

    #[test]
    fn formatting_is_idempotent() {
        for v in [1.0 / 7.0, 2.5e-17, -9.87654321012345e9, 1e-4, 0.99999999999999] {
            let s = format_number(v);
            assert_eq!(format_number(s.parse().unwrap()), s);
        }
    }

    #[test]
    fn json_nan_is_null() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Num(f64::NAN), Cell::Text("x".into())]);
        let mut buf = Vec::new();
        t.write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][0][0], Value::Null);
    }
}
