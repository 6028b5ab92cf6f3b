//! Printing results as JSON or as a one-row CSV table.

use std::io::Write;

use lattice_spectra::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use crate::Format;

pub fn print<T: Serialize>(value: &T, format: Format) -> Result<()> {
    let text = render(value, format)?;
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn render<T: Serialize>(value: &T, format: Format) -> Result<String> {
    let v = serde_json::to_value(value)?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&v)? + "\n"),
        Format::Csv => csv_row(&v),
    }
}

/// Top-level fields become columns; nested values are written as JSON.
fn csv_row(v: &Value) -> Result<String> {
    let Value::Object(map) = v else {
        return Err(Error::InvalidArgument("only records can be written as CSV".into()));
    };
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(map.keys()).map_err(err)?;
    w.write_record(map.values().map(cell)).map_err(err)?;
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
