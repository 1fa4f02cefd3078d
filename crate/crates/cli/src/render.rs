use mathdsl_core::lexer::ParseError;
use mathdsl_core::number::{format_plain, Scalar};
use serde_json::Value;

pub fn plain(x: f64) -> String {
    format_plain(x)
}

pub fn scalar_plain(s: &Scalar) -> String {
    format_plain(s.to_f64())
}

/// Exact values become `"p/q"` strings; floats stay JSON numbers.
pub fn scalar_json(s: &Scalar) -> Value {
    match s.as_exact() {
        Some(r) if r.is_integer() => Value::String(r.numer().to_string()),
        Some(r) => Value::String(format!("{}/{}", r.numer(), r.denom())),
        None => Value::from(s.to_f64()),
    }
}

/// Error text with a 1-based column and a caret under the offending input.
pub fn parse_error(src: &str, e: &ParseError) -> String {
    let offset = e.offset.min(src.len());
    let column = src[..offset].chars().count() + 1;
    format!(
        "column {column}: expected {}, found {}\n  {src}\n  {}^",
        e.expected.join(" | "),
        e.found,
        " ".repeat(column - 1)
    )
}
