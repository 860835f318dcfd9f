//! Parameter parsing and table/JSON writers shared by the subcommands.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// Grid points of `a:b:step`, inclusive of `b` up to a slack of 1e−12.
/// A single number is a one-point grid.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Validation(format!("malformed range '{text}', expected a:b:step or a number"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if parts.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    match parts[..] {
        [x] => Ok(vec![x]),
        [a, b, step] => {
            if !(step > 0.0) || b < a {
                return Err(CliError::Validation(format!("range '{text}' needs step > 0 and a <= b")));
            }
            let count = ((b - a) / step + 1e-12).floor() as usize + 1;
            if count > 10_000_000 {
                return Err(CliError::Validation(format!("range '{text}' has too many points")));
            }
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(bad()),
    }
}

/// Integer grid `a:b:step` (or a single integer), inclusive of `b`.
pub fn parse_int_range(text: &str) -> Result<Vec<i64>, CliError> {
    let bad = || CliError::Validation(format!("malformed integer range '{text}'"));
    let parts: Vec<i64> = text.split(':').map(|p| p.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match parts[..] {
        [x] => Ok(vec![x]),
        [a, b, step] if step > 0 && a <= b => Ok((a..=b).step_by(step as usize).collect()),
        _ => Err(bad()),
    }
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form of a float with 12 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    let r = sig12(x);
    if r != 0.0 && (r.abs() < 1e-6 || r.abs() >= 1e15) {
        // Plain notation would spell out long runs of zeros.
        return format!("{r:e}");
    }
    format!("{r}")
}

/// Rounds every float inside a JSON value to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = sig12(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Destination of an artifact: a file or standard output.
pub fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", path.display())))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::BufWriter::new(io::stdout().lock()))),
    }
}

/// A table written as CSV with a leading `# key=value` comment line.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, sink: &mut dyn Write, meta: &str) -> Result<(), CliError> {
        writeln!(sink, "# {meta}")?;
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(&self.header).map_err(|e| CliError::Io(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// The table as a JSON array of objects; numeric cells become numbers.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| {
                        let cell = if let Ok(i) = v.parse::<i64>() {
                            serde_json::json!(i)
                        } else {
                            match v.parse::<f64>() {
                                Ok(x) if x.is_finite() => serde_json::json!(x),
                                Ok(_) => Value::Null,
                                Err(_) => Value::String(v.clone()),
                            }
                        };
                        (k.clone(), cell)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

pub fn write_json(sink: &mut dyn Write, value: Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *sink, &round_json(value)).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}
