//! Deterministic JSON reports: sorted keys, floats at 17 significant digits.

use std::fmt::Write as _;

use grioli_core::linalg::SquareMatrix;
use serde_json::{Map, Value};

pub const SCHEMA: u64 = 1;

/// A finite float as a JSON number; infinities and NaN as strings.
pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::String("nan".into()),
        None if x > 0.0 => Value::String("inf".into()),
        None => Value::String("-inf".into()),
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn matrix(m: &SquareMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| nums(r)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    /// `measured >= bound` rather than `measured <= bound`.
    pub lower: bool,
}

impl Assertion {
    /// `measured <= bound`.
    pub fn new(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Assertion { name: name.into(), measured, bound, lower: false }
    }

    /// `measured >= bound`.
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Assertion { name: name.into(), measured, bound, lower: true }
    }

    pub fn passed(&self) -> bool {
        if self.lower {
            self.measured >= self.bound
        } else {
            self.measured <= self.bound
        }
    }

    fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("measured".into(), num(self.measured));
        m.insert("bound".into(), num(self.bound));
        m.insert("relation".into(), Value::String(if self.lower { ">=" } else { "<=" }.into()));
        m.insert("passed".into(), Value::Bool(self.passed()));
        Value::Object(m)
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub results: Map<String, Value>,
    pub assertions: Vec<Assertion>,
    pub wall_time: Option<f64>,
}

impl Report {
    pub fn new(command: &'static str, config: Value) -> Self {
        Report { command, config, results: Map::new(), assertions: Vec::new(), wall_time: None }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.results.insert(key.into(), value);
    }

    pub fn check(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(Assertion::passed)
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), Value::from(SCHEMA));
        m.insert("command".into(), Value::String(self.command.into()));
        m.insert("config".into(), self.config.clone());
        m.insert("results".into(), Value::Object(self.results.clone()));
        m.insert("assertions".into(), Value::Array(self.assertions.iter().map(Assertion::to_value).collect()));
        m.insert("passed".into(), Value::Bool(self.passed()));
        if let Some(t) = self.wall_time {
            m.insert("wall_time_s".into(), num(t));
        }
        Value::Object(m)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        write_value(&mut out, &self.to_value(), 0);
        out.push('\n');
        out
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Pretty JSON with keys sorted and every float written as `{:.16e}`.
/// Arrays of scalars stay on one line.
pub fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                write!(out, "{:.16e}", n.as_f64().expect("finite")).unwrap();
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, level);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                indent(out, level + 1);
                write!(out, "{}: ", Value::String((*k).clone())).unwrap();
                write_value(out, &map[*k], level + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
}
