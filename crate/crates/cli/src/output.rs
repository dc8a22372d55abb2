//! Machine-readable outputs: JSON records with 17 significant digits and CSV
//! tables for per-term and ladder data.

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use std::io::{self, Write};
use std::path::Path;

/// JSON formatter writing every float with 17 significant digits.
#[derive(Debug, Default, Clone, Copy)]
pub struct SigFigFormatter;

impl Formatter for SigFigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SigFigFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf)?)
}

/// A CSV table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Table) {
        if self.header.is_empty() {
            self.header = other.header;
        }
        self.rows.extend(other.rows);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).with_context(|| format!("writing {}", path.display()))
    }
}

/// A float cell with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// The outcome of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    /// SHA-256 of the canonical config text.
    pub config_sha256: String,
    pub version: String,
    pub wall_time_seconds: f64,
    pub pass: bool,
    pub payload: serde_json::Value,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl RunRecord {
    /// The payload as JSON text; identical configs give identical bytes.
    pub fn payload_json(&self) -> Result<String> {
        to_json(&self.payload)
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&serde_json::json!({"x": 0.1, "y": [1.0, -2.5e-300], "n": 3, "nan": f64::NAN})).unwrap();
        assert_eq!(s, r#"{"n":3,"nan":null,"x":1.0000000000000001e-1,"y":[1.0000000000000000e0,-2.5000000000000000e-300]}"#);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn csv_table() {
        let mut t = Table::new(&["n", "value"]);
        t.push(vec!["1".into(), num(0.5)]);
        assert_eq!(t.to_csv().unwrap(), "n,value\n1,5.0000000000000000e-1\n");
    }
}
