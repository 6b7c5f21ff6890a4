//! Text emission helpers shared by the harness reports and the CLI.

/// Render a float for CSV/JSON output: 17 significant digits (round-trip
/// safe), with `inf` / `-inf` as the only textual forms of the infinities.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// JSON value for a float, using the string "inf"/"-inf" for infinities
/// (serde_json has no numeric token for them).
pub fn json_float(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::Value::String(fmt_float(x))
    }
}
