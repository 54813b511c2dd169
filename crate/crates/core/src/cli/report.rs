//! Canonical report serialization.

use serde_json::{Map, Value};

/// Floats with 17 significant digits.
fn number(n: &serde_json::Number) -> String {
    if n.is_f64() {
        let x = n.as_f64().unwrap_or(f64::NAN);
        // no negative zero in reports
        let x = if x == 0.0 { 0.0 } else { x };
        format!("{x:.16e}")
    } else {
        n.to_string()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n(' ', 2 * k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&number(n)),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            // serde_json maps are ordered by key
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Sorted keys, two-space indentation, floats at 17 significant digits.
pub fn to_canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn flatten(prefix: &str, v: &Value, lines: &mut Vec<String>) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, item) in map {
                flatten(&if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") }, item, lines);
            }
        }
        Value::Array(items) if !items.is_empty() && items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, lines);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            lines.push(format!("{prefix} = [{}]", parts.join(", ")));
        }
        other => lines.push(format!("{prefix} = {}", scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Number(n) => number(n),
        Value::String(s) => s.clone(),
        Value::Object(_) => "{}".into(),
        other => other.to_string(),
    }
}

/// One `path = value` line per leaf, preceded by a summary header.
pub fn to_text(report: &Value) -> String {
    let mut lines = Vec::new();
    if let Some(cmd) = report.get("command").and_then(Value::as_str) {
        lines.push(format!("command: {cmd}"));
    }
    if let Some(verdict) = report.pointer("/results/classification/verdict").and_then(Value::as_str) {
        lines.push(format!("verdict: {verdict}"));
    }
    let errors = report.get("errors").and_then(Value::as_array).map_or(0, Vec::len);
    lines.push(format!("status: {}", if errors == 0 { "ok" } else { "error" }));
    flatten("", report, &mut lines);
    lines.join("\n") + "\n"
}

/// `{"value": x, "error_bound": e}`.
pub fn estimate(value: f64, error_bound: f64) -> Value {
    let mut m = Map::new();
    m.insert("value".into(), float(value));
    m.insert("error_bound".into(), float(error_bound));
    Value::Object(m)
}

/// `{"value": x, "exact": true}`, with the rational form when known.
pub fn exact(value: f64, rational: Option<String>) -> Value {
    let mut m = Map::new();
    m.insert("value".into(), float(value));
    m.insert("exact".into(), Value::Bool(true));
    if let Some(r) = rational {
        m.insert("rational".into(), Value::String(r));
    }
    Value::Object(m)
}

/// A float, with non-finite values spelled out as strings.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(format!("{x}")), Value::Number)
}
