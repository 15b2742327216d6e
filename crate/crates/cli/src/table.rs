//! Tabular emission of result envelopes: a JSON array, or CSV whose columns
//! are the flattened output keys in lexicographic (bytewise) order.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

use crate::canonical::{render_f64, to_canonical_string, ResultEnvelope};
use crate::error::{CliError, CliResult};

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Renders a batch of envelopes.
///
/// All envelopes must share one command kind. JSON yields an array (an
/// empty batch yields `[]`); CSV yields one row per envelope under a header
/// of the union of flattened output keys, sorted bytewise (an empty batch
/// yields an empty byte stream, there being no columns to name).
pub fn emit_table(envelopes: &[ResultEnvelope], format: Format) -> CliResult<String> {
    if let Some(first) = envelopes.first() {
        if let Some(other) = envelopes.iter().find(|e| e.command != first.command) {
            return Err(CliError::usage(format!(
                "cannot tabulate mixed command kinds: {} and {}",
                first.command, other.command
            )));
        }
    }
    match format {
        Format::Json => {
            let array = Value::Array(envelopes.iter().map(|e| e.to_value()).collect());
            Ok(to_canonical_string(&array))
        }
        Format::Csv => emit_csv(envelopes),
    }
}

fn emit_csv(envelopes: &[ResultEnvelope]) -> CliResult<String> {
    if envelopes.is_empty() {
        return Ok(String::new());
    }
    let rows: Vec<BTreeMap<String, String>> = envelopes
        .iter()
        .map(|e| {
            let mut cells = BTreeMap::new();
            flatten("", &e.outputs, &mut cells);
            cells
        })
        .collect();
    let mut columns = BTreeSet::new();
    for row in &rows {
        columns.extend(row.keys().cloned());
    }
    let columns: Vec<String> = columns.into_iter().collect();

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(&columns)
        .and_then(|()| {
            rows.iter().try_for_each(|row| {
                writer.write_record(
                    columns.iter().map(|c| row.get(c).map(String::as_str).unwrap_or("")),
                )
            })
        })
        .map_err(|e| CliError::usage(format!("csv emission failed: {e}")))?;
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::usage(format!("csv emission failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Flattens nested outputs into dotted paths: objects extend the path with
/// `.key`, arrays with `.<position>`; scalars become cells.
fn flatten(prefix: &str, value: &Value, out: &mut BTreeMap<String, String>) {
    let path = |suffix: &str| {
        if prefix.is_empty() {
            suffix.to_string()
        } else {
            format!("{prefix}.{suffix}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&path(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&path(&i.to_string()), v, out);
            }
        }
        leaf => {
            out.insert(prefix.to_string(), render_leaf(leaf));
        }
    }
}

fn render_leaf(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                u.to_string()
            } else if let Some(i) = n.as_i64() {
                i.to_string()
            } else {
                n.as_f64().and_then(render_f64).unwrap_or_default()
            }
        }
        Value::String(s) => s.clone(),
        _ => unreachable!("containers are flattened"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn envelope(command: &str, outputs: Value) -> ResultEnvelope {
        ResultEnvelope {
            command: command.into(),
            config_digest: "00".into(),
            outputs,
            warnings: vec![],
        }
    }

    #[test]
    fn empty_batch_yields_empty_array_and_empty_csv() {
        assert_eq!(emit_table(&[], Format::Json).unwrap(), "[]");
        assert_eq!(emit_table(&[], Format::Csv).unwrap(), "");
    }

    #[test]
    fn norm_row_has_lexicographic_columns() {
        let env = envelope(
            "norm",
            json!({
                "norm": 5.0,
                "sigma_bracket": [4.9999999, 5.0],
                "rows_used": 4,
                "certified": true
            }),
        );
        let csv = emit_table(&[env], Format::Csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "certified,norm,rows_used,sigma_bracket.0,sigma_bracket.1"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("true,5.0000000000000000e0,4,"), "{row}");
        assert!(lines.next().is_none());
    }

    #[test]
    fn mixed_command_kinds_are_a_usage_error() {
        let a = envelope("norm", json!({"norm": 1.0}));
        let b = envelope("check", json!({"passed": true}));
        let err = emit_table(&[a, b], Format::Json).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_keys_leave_empty_cells() {
        let a = envelope("check", json!({"epsilon": 0.5, "passed": true}));
        let b = envelope("check", json!({"epsilon": null, "passed": false}));
        let csv = emit_table(&[a, b], Format::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "epsilon,passed");
        assert!(lines[1].starts_with("5.0000000000000000e-1,true"));
        assert_eq!(lines[2], ",false");
    }

    #[test]
    fn csv_quotes_embedded_commas() {
        let env = envelope("check", json!({"worst_case": {"description": "a, b"}}));
        let csv = emit_table(&[env], Format::Csv).unwrap();
        assert!(csv.contains("\"a, b\""), "{csv}");
        assert!(csv.starts_with("worst_case.description"), "{csv}");
    }

    #[test]
    fn json_batch_is_an_array_of_envelopes() {
        let a = envelope("check", json!({"epsilon": 1.0}));
        let b = envelope("check", json!({"epsilon": 0.5}));
        let text = emit_table(&[a, b], Format::Json).unwrap();
        assert!(text.starts_with("[{\"command\":\"check\""), "{text}");
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 2);
    }
}
