//! Report values and their two renderings.
//!
//! Reports are `serde_json` values; object keys are kept sorted, so equal
//! inputs produce byte-identical output. Every number in the `results`
//! block is an object `{"value": .., "method": ..}`.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use locdyn_core::{AbsValue, Element, Matrix, Rational};

use crate::syntax::rational_text;

/// A result number with the name of the method that produced it.
pub fn tagged(value: impl Into<Value>, method: &str) -> Value {
    json!({ "value": value.into(), "method": method })
}

pub fn rational(r: &Rational) -> Value {
    Value::String(rational_text(r))
}

pub fn tagged_rational(r: &Rational, method: &str) -> Value {
    tagged(rational(r), method)
}

pub fn abs_value(a: &AbsValue) -> Value {
    Value::String(a.to_string())
}

pub fn element(e: &Element) -> Value {
    Value::String(e.to_string())
}

pub fn vector(v: &[Element]) -> Value {
    Value::Array(v.iter().map(element).collect())
}

/// Rows of entries.
pub fn matrix(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector(&m.row(i))).collect())
}

/// Columns of a basis matrix, one vector each.
pub fn columns(m: &Matrix) -> Value {
    Value::Array(m.columns().iter().map(|c| vector(c)).collect())
}

pub fn is_tagged(v: &Value) -> bool {
    matches!(v, Value::Object(o) if o.len() == 2 && o.contains_key("value") && o.contains_key("method"))
}

/// Collects the paths of numbers in `v` that carry no method tag.
pub fn untagged_numbers(v: &Value, path: &str, out: &mut Vec<String>) {
    match v {
        Value::Number(_) => out.push(path.to_string()),
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                untagged_numbers(x, &format!("{path}/{i}"), out);
            }
        }
        Value::Object(_) if is_tagged(v) => {}
        Value::Object(o) => {
            for (k, x) in o {
                untagged_numbers(x, &format!("{path}/{k}"), out);
            }
        }
        _ => {}
    }
}

pub fn to_json_text(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn is_flat_array(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.iter().all(is_scalar))
}

fn is_table(v: &Value) -> bool {
    matches!(v, Value::Array(a) if !a.is_empty() && a.iter().all(is_flat_array))
}

/// Plain-text rendering: one `key  value  [method]` line per entry, nested
/// blocks indented, matrices as aligned rows.
pub fn to_text(report: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(o) = report {
        // headline fields first, the rest in key order
        let lead = ["task", "topic", "status", "error"];
        let mut head = Map::new();
        let mut rest = Map::new();
        for (k, v) in o {
            if lead.contains(&k.as_str()) {
                head.insert(k.clone(), v.clone());
            } else {
                rest.insert(k.clone(), v.clone());
            }
        }
        for k in lead {
            if let Some(v) = head.get(k) {
                let _ = writeln!(out, "{k:<7} {}", scalar(v));
            }
        }
        render_object(&rest, 0, &mut out);
    } else {
        out.push_str(&scalar(report));
        out.push('\n');
    }
    out
}

fn render_object(o: &Map<String, Value>, indent: usize, out: &mut String) {
    let width = o
        .iter()
        .filter(|(_, v)| is_scalar(v) || is_tagged(v) || is_flat_array(v))
        .map(|(k, _)| k.len())
        .max()
        .unwrap_or(0);
    let pad = " ".repeat(indent);
    for (k, v) in o {
        if is_tagged(v) {
            let val = &v["value"];
            let shown = if is_flat_array(val) {
                let parts: Vec<String> = val.as_array().unwrap().iter().map(scalar).collect();
                format!("[{}]", parts.join(", "))
            } else if is_scalar(val) {
                scalar(val)
            } else {
                val.to_string()
            };
            let _ = writeln!(out, "{pad}{k:<width$}  {shown}  [{}]", scalar(&v["method"]));
        } else if is_scalar(v) {
            let _ = writeln!(out, "{pad}{k:<width$}  {}", scalar(v));
        } else if is_table(v) {
            let _ = writeln!(out, "{pad}{k}:");
            render_table(v.as_array().unwrap(), indent + 2, out);
        } else if is_flat_array(v) {
            let parts: Vec<String> = v.as_array().unwrap().iter().map(scalar).collect();
            let _ = writeln!(out, "{pad}{k:<width$}  [{}]", parts.join(", "));
        } else {
            let _ = writeln!(out, "{pad}{k}:");
            match v {
                Value::Object(inner) => render_object(inner, indent + 2, out),
                Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        match item {
                            Value::Object(inner) => {
                                let _ = writeln!(out, "{pad}  [{i}]");
                                render_object(inner, indent + 4, out);
                            }
                            other => {
                                let _ = writeln!(out, "{pad}  [{i}] {}", compact(other));
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}

fn compact(v: &Value) -> String {
    if is_table(v) {
        let rows: Vec<String> = v
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r.as_array().unwrap().iter().map(scalar).collect::<Vec<_>>().join(", "))
            .collect();
        format!("[{}]", rows.join("; "))
    } else if is_flat_array(v) {
        let parts: Vec<String> = v.as_array().unwrap().iter().map(scalar).collect();
        format!("[{}]", parts.join(", "))
    } else {
        v.to_string()
    }
}

fn render_table(rows: &[Value], indent: usize, out: &mut String) {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.as_array().unwrap().iter().map(scalar).collect()).collect();
    let ncols = cells.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols).map(|j| cells.iter().filter_map(|r| r.get(j)).map(String::len).max().unwrap_or(0)).collect();
    let pad = " ".repeat(indent);
    for r in &cells {
        let line: Vec<String> = r.iter().enumerate().map(|(j, c)| format!("{c:>w$}", w = widths[j])).collect();
        let _ = writeln!(out, "{pad}{}", line.join("  ").trim_end());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_untagged_numbers() {
        let v = json!({"a": tagged(3, "polygon"), "b": {"c": 4}, "d": [tagged([[1, 2]], "x"), 2]});
        let mut out = Vec::new();
        untagged_numbers(&v, "", &mut out);
        assert_eq!(out, vec!["/b/c".to_string(), "/d/1".to_string()]);
    }

    #[test]
    fn text_layout() {
        let v = json!({"task": "scale", "results": {"exponent": tagged(1, "polygon"), "m": [["1", "p"], ["0", "p^2"]]}});
        let t = to_text(&v);
        assert!(t.contains("exponent  1  [polygon]"), "{t}");
        assert!(t.contains("    1    p\n"), "{t}");
    }
}
