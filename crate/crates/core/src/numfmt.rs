//! Locale-free number formatting shared by every text format.

/// Shortest decimal string that parses back to exactly `v`. Negative zero
/// prints as `0`.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}
