//! Rendering of reports as JSON, CSV or an aligned text table.
//!
//! Every report is a JSON object; CSV and table output are derived from the
//! same value so all three formats carry identical numbers. Reals use 17
//! significant digits.

use std::str::FromStr;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Formats a finite real with 17 significant digits.
pub fn real_text(v: f64) -> String {
    if v == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{:.16e}", v.abs());
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let sign = if v < 0.0 { "-" } else { "" };
    if (-5..17).contains(&exp) {
        if exp >= 0 {
            let split = exp as usize + 1;
            let (int, frac) = digits.split_at(split);
            let frac = if frac.is_empty() { "0" } else { frac };
            format!("{sign}{int}.{frac}")
        } else {
            format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else {
        format!("{sign}{mant}e{exp}")
    }
}

/// Rewrites every non-integer number in `v` to 17 significant digits.
pub fn normalize_reals(v: &mut Value) {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            if let Some(f) = n.as_f64() {
                *v = if f.is_finite() {
                    Value::Number(Number::from_str(&real_text(f)).expect("valid JSON number"))
                } else {
                    Value::String(f.to_string())
                };
            }
        }
        Value::Array(items) => items.iter_mut().for_each(normalize_reals),
        Value::Object(map) => map.values_mut().for_each(normalize_reals),
        _ => {}
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        other => serde_json::to_string(other).expect("serializable"),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

type Fields = Vec<(String, String)>;

/// Scalar fields (everything but `rows`) and the row objects, if any.
fn split(report: &Value) -> (Fields, Vec<Map<String, Value>>) {
    let Value::Object(map) = report else {
        return (vec![("value".into(), cell(report))], Vec::new());
    };
    let scalars = map.iter().filter(|(k, _)| k.as_str() != "rows").map(|(k, v)| (k.clone(), cell(v))).collect();
    let rows = match map.get("rows") {
        Some(Value::Array(items)) => items
            .iter()
            .map(|r| match r {
                Value::Object(m) => m.clone(),
                other => Map::from_iter([("value".to_string(), other.clone())]),
            })
            .collect(),
        _ => Vec::new(),
    };
    (scalars, rows)
}

fn row_columns(rows: &[Map<String, Value>]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for k in r.keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

/// CSV: one header line, then one line per row with the report's scalar
/// fields repeated; reports without rows produce a single line.
pub fn to_csv(report: &Value) -> String {
    let (scalars, rows) = split(report);
    let cols = row_columns(&rows);
    let mut header: Vec<String> = scalars.iter().map(|(k, _)| k.clone()).collect();
    header.extend(cols.iter().map(|c| format!("row.{c}")));
    let mut out = header.iter().map(|h| csv_escape(h)).collect::<Vec<_>>().join(",");
    out.push('\n');
    let base: Vec<String> = scalars.iter().map(|(_, v)| csv_escape(v)).collect();
    if rows.is_empty() {
        out.push_str(&base.join(","));
        out.push('\n');
    }
    for r in &rows {
        let mut line = base.clone();
        line.extend(cols.iter().map(|c| csv_escape(&r.get(c).map(cell).unwrap_or_default())));
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Aligned text: `key: value` lines, then the rows as columns.
pub fn to_table(report: &Value) -> String {
    let (scalars, rows) = split(report);
    let width = scalars.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in &scalars {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    if !rows.is_empty() {
        let cols = row_columns(&rows);
        let cells: Vec<Vec<String>> =
            rows.iter().map(|r| cols.iter().map(|c| r.get(c).map(cell).unwrap_or_default()).collect()).collect();
        let widths: Vec<usize> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).max().unwrap_or(0).max(c.len()))
            .collect();
        let line = |items: Vec<&str>| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        out.push('\n');
        out.push_str(&line(cols.iter().map(String::as_str).collect()));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
            out.push('\n');
        }
    }
    out
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(report),
        Format::Table => to_table(report),
    }
}
