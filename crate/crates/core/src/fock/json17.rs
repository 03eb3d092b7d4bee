use serde_json::Value;

/// Pretty JSON in which every non-integer number is written with 17
/// significant digits (`{:.16e}`). Integers are written as integers.
pub fn to_json_17(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(value: &Value, level: usize, out: &mut String) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let v = n.as_f64().expect("f64 number");
                out.push_str(&format!("{v:.16e}"));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(level + 1, out);
                write_value(item, level + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(level, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                indent(level + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(v, level + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(level, out);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trips_and_pads() {
        let v = json!({"a": 0.1, "b": [1, 0.25e-10], "c": {"d": "x"}});
        let text = to_json_17(&v);
        assert!(text.contains("1.0000000000000001e-1"));
        assert!(text.contains("2.5000000000000001e-11"));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"], 0.1);
        assert_eq!(back["b"][0], 1);
    }
}
