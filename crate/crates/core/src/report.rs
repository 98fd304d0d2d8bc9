//! JSON output with fixed 17-significant-digit numbers.

use serde::Serialize;
use serde_json::value::RawValue;

pub const SCHEMA_VERSION: &str = "v1";

/// A number rendered as `d.dddddddddddddddde±x`; non-finite values become `null`.
pub fn num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { format!("{x:.16e}") } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

pub fn nums(xs: &[f64]) -> Vec<Box<RawValue>> {
    xs.iter().map(|&x| num(x)).collect()
}

/// The common envelope of verification reports.
#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub kind: String,
    pub inputs: serde_json::Map<String, serde_json::Value>,
    pub values: Vec<Box<RawValue>>,
    pub residuals: Vec<Box<RawValue>>,
    pub quad_error: Box<RawValue>,
    pub pass: bool,
}

impl Report {
    pub fn new(kind: impl Into<String>) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            kind: kind.into(),
            inputs: serde_json::Map::new(),
            values: Vec::new(),
            residuals: Vec::new(),
            quad_error: num(0.0),
            pass: false,
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<InputValue>) -> Self {
        let v = match value.into() {
            InputValue::Num(x) => serde_json::Value::from(x),
            InputValue::Int(i) => serde_json::Value::from(i),
            InputValue::Text(s) => serde_json::Value::from(s),
            InputValue::List(v) => serde_json::Value::from(v),
        };
        self.inputs.insert(key.to_string(), v);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub enum InputValue {
    Num(f64),
    Int(i64),
    Text(String),
    List(Vec<i64>),
}

impl From<f64> for InputValue {
    fn from(x: f64) -> Self {
        InputValue::Num(x)
    }
}

impl From<usize> for InputValue {
    fn from(x: usize) -> Self {
        InputValue::Int(x as i64)
    }
}

impl From<&str> for InputValue {
    fn from(x: &str) -> Self {
        InputValue::Text(x.to_string())
    }
}

impl From<String> for InputValue {
    fn from(x: String) -> Self {
        InputValue::Text(x)
    }
}

impl From<Vec<usize>> for InputValue {
    fn from(x: Vec<usize>) -> Self {
        InputValue::List(x.into_iter().map(|v| v as i64).collect())
    }
}
