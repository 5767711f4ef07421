//! Plain-text rendering of JSON reports.

use std::fmt::Write;

use serde_json::{Map, Value};

pub fn text(report: &Value) -> String {
    let mut out = String::new();
    match report {
        Value::Object(m) => object(&mut out, m, 0),
        other => {
            let _ = writeln!(out, "{}", inline(other).unwrap_or_else(|| other.to_string()));
        }
    }
    out
}

/// Scalars and nested arrays of scalars on one line; `None` for anything with objects.
fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => {
            let parts = items.iter().map(inline).collect::<Option<Vec<_>>>()?;
            Some(format!("[{}]", parts.join(", ")))
        }
        Value::Object(_) => None,
    }
}

fn object(out: &mut String, m: &Map<String, Value>, depth: usize) {
    let pad = "  ".repeat(depth);
    for (key, v) in m {
        if let Some(s) = inline(v) {
            let _ = writeln!(out, "{pad}{key}: {s}");
        } else if let Some(rows) = table_rows(v) {
            let _ = writeln!(out, "{pad}{key}:");
            table(out, &rows, depth + 1);
        } else {
            let _ = writeln!(out, "{pad}{key}:");
            match v {
                Value::Object(inner) => object(out, inner, depth + 1),
                Value::Array(items) => {
                    for item in items {
                        let _ = writeln!(out, "{pad}  -");
                        match item {
                            Value::Object(inner) => object(out, inner, depth + 2),
                            other => {
                                let _ = writeln!(out, "{pad}    {other}");
                            }
                        }
                    }
                }
                _ => unreachable!("scalars render inline"),
            }
        }
    }
}

/// Arrays of flat objects sharing the same keys render as a table.
fn table_rows(v: &Value) -> Option<Vec<&Map<String, Value>>> {
    let items = v.as_array()?;
    let rows: Vec<&Map<String, Value>> = items.iter().map(Value::as_object).collect::<Option<_>>()?;
    let first = rows.first()?;
    let same_keys = rows.iter().all(|r| r.keys().eq(first.keys()));
    let flat = rows.iter().all(|r| r.values().all(|x| inline(x).is_some()));
    (same_keys && flat).then_some(rows)
}

fn table(out: &mut String, rows: &[&Map<String, Value>], depth: usize) {
    let pad = "  ".repeat(depth);
    let header: Vec<&str> = rows[0].keys().map(String::as_str).collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.values().map(|x| inline(x).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            cells
                .iter()
                .map(|r| r[c].len())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: Vec<&str>| -> String {
        items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let _ = writeln!(out, "{pad}{}", line(header.clone()));
    for r in &cells {
        let _ = writeln!(out, "{pad}{}", line(r.iter().map(String::as_str).collect()));
    }
}
