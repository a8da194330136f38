//! Compact JSON with every float written as `{:.16e}` (17 significant
//! digits), so output is byte-stable and round-trips exactly.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(f64::NAN), "null");
        let x: f64 = format_float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(x, std::f64::consts::PI);
    }

    #[test]
    fn nested_values() {
        let mut m = BTreeMap::new();
        m.insert("b", vec![1.5, 2.0]);
        m.insert("a", vec![]);
        assert_eq!(to_string(&m).unwrap(), r#"{"a":[],"b":[1.5000000000000000e0,2.0000000000000000e0]}"#);
        assert_eq!(to_string(&(3u32, "x\"y", true, None::<f64>)).unwrap(), r#"[3,"x\"y",true,null]"#);
    }

    #[test]
    fn output_parses_back() {
        let v = vec![1e-300, -2.5e17, 6.02214076e23];
        let s = to_string(&v).unwrap();
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
