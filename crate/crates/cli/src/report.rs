//! Report documents, schema tag `barricade-report/1`.

use std::io;

use barricade_core::Vector;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

pub const SCHEMA: &str = "barricade-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskResult {
    pub index: usize,
    pub task: String,
    pub status: String,
    pub certificate: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub tasks: Vec<TaskResult>,
}

impl Report {
    /// False if any task carrying an expectation missed it.
    pub fn all_match(&self) -> bool {
        self.tasks.iter().all(|t| t.matches != Some(false))
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter::default());
        self.serialize(&mut ser).expect("report serializes");
        buf.push(b'\n');
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}

/// JSON number, or a string for the non-finite values.
pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::String("nan".into()),
        None if x > 0.0 => Value::String("inf".into()),
        None => Value::String("-inf".into()),
    }
}

pub fn vec_value(v: &Vector) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

/// Pretty output with every float written to 17 significant digits.
#[derive(Default)]
struct SigFormatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for SigFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_17_digits() {
        let r = Report {
            schema: SCHEMA.into(),
            scenario: None,
            seed: 0,
            meta: None,
            tasks: vec![TaskResult {
                index: 0,
                task: "t".into(),
                status: "ok".into(),
                certificate: serde_json::json!({"x": num(0.1), "y": num(f64::INFINITY), "k": 3}),
                bounds: None,
                anchor: None,
                expected: None,
                matches: None,
                wall_time_ms: None,
            }],
        };
        let s = r.to_json();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"inf\""));
        assert_eq!(Report::from_json(&s).unwrap(), r);
    }
}
