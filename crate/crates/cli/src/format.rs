use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::Value;

use crate::record::ResultRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One JSON object per line.
    Json,
    /// Header row, then one line per record.
    Csv,
    /// Six significant digits, for reading.
    Human,
}

pub fn write_records(out: &mut dyn Write, records: &[ResultRecord], format: Format) -> io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                writeln!(out, "{}", serde_json::to_string(r).map_err(io::Error::other)?)?;
            }
            Ok(())
        }
        Format::Csv => write_csv(out, records),
        Format::Human => {
            for r in records {
                write_human(out, r)?;
            }
            Ok(())
        }
    }
}

/// Flatten a record into dotted columns. Arrays of scalars become one
/// `;`-joined cell; numbers keep the exact text of their JSON encoding.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let cell: Vec<String> = xs.iter().map(scalar).collect();
            out.push((prefix.to_string(), cell.join(";")));
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv(out: &mut dyn Write, records: &[ResultRecord]) -> io::Result<()> {
    let rows: Vec<Vec<(String, String)>> = records
        .iter()
        .map(|r| {
            let mut cells = Vec::new();
            flatten("", &serde_json::to_value(r).expect("records serialize"), &mut cells);
            cells
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header)?;
    for row in &rows {
        let line: Vec<&str> = header
            .iter()
            .map(|h| row.iter().find(|(k, _)| k == h).map(|(_, v)| v.as_str()).unwrap_or(""))
            .collect();
        w.write_record(&line)?;
    }
    w.flush()?;
    Ok(())
}

/// `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.5e}")
    }
}

fn human_value(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_u64() && !n.is_i64() => sig6(x),
            _ => n.to_string(),
        },
        Value::Array(xs) => {
            let parts: Vec<String> = xs.iter().map(human_value).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_human(out: &mut dyn Write, r: &ResultRecord) -> io::Result<()> {
    let i = &r.inputs;
    let mut head = r.command.clone();
    if let Some(n) = i.n {
        head.push_str(&format!(" n={n}"));
    }
    if let Some(p) = &i.p {
        head.push_str(&format!(" p={p}"));
    }
    if let Some([a, b]) = i.interval {
        head.push_str(&format!(" on [{}, {}]", sig6(a), sig6(b)));
    }
    writeln!(out, "{head}")?;
    for section in [&r.outputs, &r.provenance] {
        let mut cells = Vec::new();
        if let Value::Object(m) = section {
            for (k, v) in m {
                match v {
                    Value::Array(xs) if xs.iter().any(Value::is_object) => {
                        for x in xs {
                            let mut inner = Vec::new();
                            if let Value::Object(xm) = x {
                                for (ik, iv) in xm {
                                    inner.push(format!("{ik}={}", human_value(iv)));
                                }
                            }
                            cells.push(format!("  {k}: {}", inner.join(" ")));
                        }
                    }
                    Value::Object(xm) => {
                        let inner: Vec<String> =
                            xm.iter().map(|(ik, iv)| format!("{ik}={}", human_value(iv))).collect();
                        cells.push(format!("  {k}: {}", inner.join(" ")));
                    }
                    _ => cells.push(format!("  {k}: {}", human_value(v))),
                }
            }
        }
        for c in cells {
            writeln!(out, "{c}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits() {
        assert_eq!(sig6(26.832815729997478), "26.8328");
        assert_eq!(sig6(0.5), "0.5");
        assert_eq!(sig6(192.0), "192");
        assert_eq!(sig6(3.464101615137754), "3.4641");
        assert_eq!(sig6(1.0e-7), "1.00000e-7");
        assert_eq!(sig6(2.6e7), "2.60000e7");
    }
}
