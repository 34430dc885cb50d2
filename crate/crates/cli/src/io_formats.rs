//! Sample CSV and JSON number formatting.

use std::io::{Read, Write};

use anyhow::{anyhow, bail};
use serde_json::{Number, Value};

/// Significant digits kept for every non-integer JSON number.
pub const JSON_SIGNIFICANT_DIGITS: usize = 12;

/// Shortest representation that parses back to `x`.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", JSON_SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every floating-point number in `v` to 12 significant digits.
pub fn round_json_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_significant).and_then(Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json_numbers),
        Value::Object(map) => map.values_mut().for_each(round_json_numbers),
        _ => {}
    }
}

/// Reads one observation per row: either a bare value or an `i,value` pair.
/// A non-numeric first row is taken as a header.
pub fn read_sample_csv(reader: impl Read) -> anyhow::Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut first = true;
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = match record.len() {
            1 => &record[0],
            2 => &record[1],
            k => bail!("row {}: expected 1 or 2 fields, found {k}", line + 1),
        };
        match field.parse::<f64>() {
            Ok(x) => values.push(x),
            Err(_) if first => {}
            Err(_) => return Err(anyhow!("row {}: {field:?} is not a number", line + 1)),
        }
        first = false;
    }
    Ok(values)
}

/// Writes `values` under an `i,value` header, indexed from 1.
pub fn write_sample_csv(values: &[f64], w: &mut dyn Write) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["i", "value"])?;
    for (k, x) in values.iter().enumerate() {
        wtr.write_record([(k + 1).to_string(), format_f64(*x)])?;
    }
    wtr.flush()?;
    Ok(())
}
