//! Canonical JSON: object keys sorted, floats printed with 17 significant
//! digits, integers verbatim, no insignificant whitespace. Equal content
//! always serialises to equal bytes.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&value, &mut out);
    Ok(out)
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serialises")),
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
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("key serialises"));
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

/// 17 significant digits in exponent form, which round-trips every finite `f64`.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        // keep the sign of -0.0 out of canonical output
        return "0.0000000000000000e0".to_string();
    }
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    #[test]
    fn keys_sorted_regardless_of_insertion_order() {
        let mut a = HashMap::new();
        a.insert("zeta", 1.5);
        a.insert("alpha", 0.25);
        let s = to_canonical_string(&a).unwrap();
        assert_eq!(s, r#"{"alpha":2.5000000000000000e-1,"zeta":1.5000000000000000e0}"#);
    }

    #[test]
    fn integers_stay_integers() {
        assert_eq!(to_canonical_string(&vec![1u32, 878]).unwrap(), "[1,878]");
    }

    proptest! {
        #[test]
        fn floats_round_trip_exactly(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = format_float(v);
            let back: f64 = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back.to_bits(), if v == 0.0 { 0.0f64.to_bits() } else { v.to_bits() });
        }
    }
}
