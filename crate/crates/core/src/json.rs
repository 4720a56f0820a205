//! Canonical JSON output: keys sorted, every float printed with 17
//! significant digits in exponent form, so identical values always produce
//! identical bytes.

use serde::Serialize;
use serde_json::Value;

/// Serializes `value` canonically. `pretty` indents with two spaces.
pub fn to_canonical_string<T: Serialize>(value: &T, pretty: bool) -> serde_json::Result<String> {
    let tree = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&tree, pretty, 0, &mut out);
    if pretty {
        out.push('\n');
    }
    Ok(out)
}

fn write_value(v: &Value, pretty: bool, depth: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                newline(pretty, depth + 1, out);
                write_value(item, pretty, depth + 1, out);
            }
            newline(pretty, depth, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            // serde_json's default map is a BTreeMap, but sort explicitly anyway
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                newline(pretty, depth + 1, out);
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push(':');
                if pretty {
                    out.push(' ');
                }
                write_value(&map[*key], pretty, depth + 1, out);
            }
            newline(pretty, depth, out);
            out.push('}');
        }
    }
}

fn newline(pretty: bool, depth: usize, out: &mut String) {
    if pretty {
        out.push('\n');
        for _ in 0..depth {
            out.push_str("  ");
        }
    }
}

/// 17 significant digits, e.g. `-2.5000000000000000e-1`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    // normalize negative zero so equal values print identically
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}
