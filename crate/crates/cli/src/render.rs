//! Output formats. JSON is canonical; `table` and `csv` flatten it.

use serde_json::{json, Value};

use crate::Format;

pub fn error_document(kind: &str, message: &str) -> Value {
    json!({ "schema": hkquot::json::SCHEMA_VERSION, "error": { "kind": kind, "message": message } })
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("path,value\n");
            for (path, value) in flatten(doc) {
                s.push_str(&format!("{},{}\n", csv_field(&path), csv_field(&value)));
            }
            s
        }
        Format::Table => table(doc),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `(path, value)` for every leaf, in document order.
fn flatten(doc: &Value) -> Vec<(String, String)> {
    fn go(v: &Value, path: String, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) if !m.is_empty() => {
                for (k, x) in m {
                    let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                    go(x, p, out);
                }
            }
            Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in a.iter().enumerate() {
                    go(x, format!("{path}[{i}]"), out);
                }
            }
            other => out.push((path, scalar(other))),
        }
    }
    let mut out = Vec::new();
    go(doc, String::new(), &mut out);
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn table(doc: &Value) -> String {
    let mut s = String::new();
    if let Some(checks) = doc.get("checks").and_then(Value::as_array) {
        s.push_str(&suite_table(doc, checks));
        return s;
    }
    let rows = flatten(doc);
    let width = rows.iter().map(|(p, _)| p.len()).max().unwrap_or(0);
    for (p, v) in rows {
        s.push_str(&format!("{p:<width$}  {v}\n"));
    }
    s
}

fn rows_of(v: Option<&Value>) -> Vec<String> {
    v.and_then(Value::as_array)
        .map(|a| {
            a.iter()
                .map(|r| {
                    let names: Vec<String> = r.as_array().map(|x| x.iter().map(scalar).collect()).unwrap_or_default();
                    format!("{{{}}}", names.join(", "))
                })
                .collect()
        })
        .unwrap_or_default()
}

/// Check list plus expected-versus-computed diffs of both tables.
fn suite_table(doc: &Value, checks: &[Value]) -> String {
    let mut s =
        format!("Hirzebruch suite n={} c0={} c1={}\n", scalar(&doc["n"]), scalar(&doc["c0"]), scalar(&doc["c1"]));
    for c in checks {
        let mark = if c["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
        s.push_str(&format!("  {mark} {:<24} {}\n", scalar(&c["name"]), scalar(&c["detail"])));
    }
    for key in ["table1", "table2"] {
        let expected = rows_of(doc[key].get("expected"));
        let computed = rows_of(doc[key].get("computed"));
        s.push_str(&format!("{key}:\n"));
        for r in &expected {
            let mark = if computed.contains(r) { ' ' } else { '-' };
            s.push_str(&format!("  {mark} {r}\n"));
        }
        for r in computed.iter().filter(|r| !expected.contains(r)) {
            s.push_str(&format!("  + {r}\n"));
        }
    }
    s.push_str(&format!("residual order: {}\n", scalar(&doc["residual_order"])));
    s
}
