//! Text rendering shared by the CSV and JSON writers.

use serde_json::Value;

/// Seventeen significant digits, enough to round-trip any double.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A JSON number carrying the exact [`fmt17`] text; non-finite values
/// become `null`.
pub fn json_number(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&fmt17(x)).expect("formatted double parses as JSON")
    } else {
        Value::Null
    }
}
