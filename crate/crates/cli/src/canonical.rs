//! Canonical JSON emission and the result envelope.
//!
//! Canonical form: object keys sorted bytewise, no insignificant whitespace,
//! every finite float written with 17 significant digits (`{:.16e}`), which
//! round-trips any binary64 value exactly. Non-finite floats have no JSON
//! representation and serialize as `null`; negative zero normalizes to zero.
//! Digesting the canonical form makes the config digest independent of key
//! order and formatting in the source file.

use serde_json::Value;
use sha2::{Digest, Sha256};

/// One command result: what ran, on which config, what came out.
#[derive(Debug, Clone)]
pub struct ResultEnvelope {
    /// Subcommand name (`norm`, `modular`, ...).
    pub command: String,
    /// Hex SHA-256 of the canonicalized run configuration (`digest` of
    /// `null` when a command runs without one).
    pub config_digest: String,
    /// Command-specific outputs.
    pub outputs: Value,
    /// Everything warning-worthy: uncertified tails, window-relative
    /// checks, hypothesis violations.
    pub warnings: Vec<String>,
}

impl ResultEnvelope {
    pub fn to_value(&self) -> Value {
        Value::Object(serde_json::Map::from_iter([
            ("command".to_string(), Value::String(self.command.clone())),
            ("config_digest".to_string(), Value::String(self.config_digest.clone())),
            ("outputs".to_string(), self.outputs.clone()),
            (
                "warnings".to_string(),
                Value::Array(
                    self.warnings.iter().map(|w| Value::String(w.clone())).collect(),
                ),
            ),
        ]))
    }
}

/// Renders a JSON value in canonical form.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, &mut out);
    out
}

/// Hex SHA-256 digest of the canonical rendering.
pub fn digest(value: &Value) -> String {
    let canonical = to_canonical_string(value);
    let hash = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in hash {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Renders a float exactly as the canonical writer does (shared with the
/// CSV emitter so both formats show identical digits).
pub fn render_f64(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    let x = if x == 0.0 { 0.0 } else { x };
    Some(format!("{x:.16e}"))
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                match n.as_f64().and_then(render_f64) {
                    Some(s) => out.push_str(&s),
                    None => out.push_str("null"),
                }
            }
        }
        Value::String(s) => write_string(s, out),
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
            keys.sort_unstable();
            out.push('{');
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_string(key, out);
                out.push(':');
                write_value(&map[*key], out);
            }
            out.push('}');
        }
    }
}

fn write_string(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{08}' => out.push_str("\\b"),
            '\u{0c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        assert_eq!(to_canonical_string(&json!(5.0)), "5.0000000000000000e0");
        assert_eq!(to_canonical_string(&json!(0.1)), "1.0000000000000001e-1");
        assert_eq!(
            to_canonical_string(&json!(1.2825498301618641)),
            "1.2825498301618641e0"
        );
    }

    #[test]
    fn canonical_floats_round_trip_bit_exactly() {
        for &x in &[5.0, 0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::MIN_POSITIVE, f64::MAX] {
            let text = render_f64(x).unwrap();
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{text}");
        }
    }

    #[test]
    fn integers_stay_integers() {
        assert_eq!(to_canonical_string(&json!(42)), "42");
        assert_eq!(to_canonical_string(&json!(u64::MAX)), u64::MAX.to_string());
        assert_eq!(to_canonical_string(&json!(-7)), "-7");
    }

    #[test]
    fn keys_sort_and_whitespace_vanishes() {
        let v = json!({"b": 1, "a": {"d": true, "c": null}});
        assert_eq!(to_canonical_string(&v), r#"{"a":{"c":null,"d":true},"b":1}"#);
    }

    #[test]
    fn non_finite_floats_become_null_and_negative_zero_normalizes() {
        assert_eq!(render_f64(f64::INFINITY), None);
        assert_eq!(render_f64(f64::NAN), None);
        assert_eq!(render_f64(-0.0).unwrap(), render_f64(0.0).unwrap());
    }

    #[test]
    fn strings_escape_correctly() {
        let v = json!("a\"b\\c\nd\te\u{01}");
        assert_eq!(to_canonical_string(&v), "\"a\\\"b\\\\c\\nd\\te\\u0001\"");
    }

    #[test]
    fn digest_is_stable_and_format_insensitive() {
        let a = json!({"x": 1.5, "y": [1, 2]});
        let b: Value = serde_json::from_str("{ \"y\": [1, 2],\n \"x\": 1.5 }").unwrap();
        assert_eq!(digest(&a), digest(&b));
        assert_eq!(digest(&a).len(), 64);
        assert_ne!(digest(&a), digest(&json!({"x": 1.5, "y": [2, 1]})));
    }

    #[test]
    fn envelope_serializes_with_fixed_key_order() {
        let env = ResultEnvelope {
            command: "norm".into(),
            config_digest: "ab".into(),
            outputs: json!({"norm": 5.0}),
            warnings: vec!["w".into()],
        };
        assert_eq!(
            to_canonical_string(&env.to_value()),
            r#"{"command":"norm","config_digest":"ab","outputs":{"norm":5.0000000000000000e0},"warnings":["w"]}"#
        );
    }
}
