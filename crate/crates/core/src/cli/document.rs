//! Tabular output documents and their CSV/JSON renderings.
//!
//! A document is a schema tag, a list of metadata pairs, fixed columns and
//! rows. Floats are written with 12 significant digits in both formats; the
//! CSV form carries the schema and metadata as `#` comment lines ahead of the
//! header row.

use std::io::Write;

use serde_json::{Map, Value};

/// Significant digits of every emitted float.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

impl Cell {
    fn to_csv_field(&self) -> String {
        match self {
            Cell::Num(v) => format_sig(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => Value::from(round_sig(*v)),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Null => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub schema: String,
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(kind: &str, columns: &[&'static str]) -> Self {
        Self {
            schema: format!("usd-attack/{kind}/v1"),
            meta: Vec::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.meta.push((key.to_owned(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for {}", self.schema);
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# schema: {}", self.schema)?;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {}", v.to_csv_field())?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv_field))?;
        }
        w.flush()
    }

    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("schema".into(), Value::from(self.schema.as_str()));
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        root.insert("meta".into(), Value::Object(meta));
        root.insert("columns".into(), Value::from(self.columns.clone()));
        let rows = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| ((*c).to_owned(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        root.insert("rows".into(), Value::Array(rows));
        Value::Object(root)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json())?;
        writeln!(out)
    }
}

/// `%.12g`-style formatting: fixed notation for decimal exponents in
/// `[-5, 12)`, scientific otherwise.
pub fn format_sig(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{mantissa}e{exp}")
    }
}

/// `v` rounded to 12 significant digits (the value a reader recovers).
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() {
        return v;
    }
    format_sig(v).parse().expect("formatted float parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.041_076_136_026_345_16), "0.0410761360263");
        assert_eq!(format_sig(13.458889464848517), "13.4588894648");
        assert_eq!(format_sig(1.0), "1.00000000000");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-2.5e-7), "-2.50000000000e-7");
        assert_eq!(format_sig(1.5e13), "1.50000000000e13");
        assert_eq!(format_sig(f64::INFINITY), "inf");
        // Rounding that bumps the exponent.
        assert_eq!(format_sig(9.9999999999999), "10.0000000000");
    }

    #[test]
    fn csv_layout() {
        let mut d = Document::new("demo", &["x", "label", "n"]);
        d.meta("eta_b", 0.5);
        d.push(vec![0.25.into(), "a".into(), 3u64.into()]);
        d.push(vec![Cell::Null, "b".into(), 4u64.into()]);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# schema: usd-attack/demo/v1\n# eta_b: 0.500000000000\nx,label,n\n0.250000000000,a,3\n,b,4\n"
        );
    }

    #[test]
    fn json_layout() {
        let mut d = Document::new("demo", &["x", "y"]);
        d.push(vec![(1.0 / 3.0).into(), Cell::Null]);
        let v = d.to_json();
        assert_eq!(v["schema"], "usd-attack/demo/v1");
        assert_eq!(v["rows"][0]["x"].as_f64().unwrap(), 0.333333333333);
        assert!(v["rows"][0]["y"].is_null());
    }
}
