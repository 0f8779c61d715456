//! Deterministic JSON reports.
//!
//! Objects keep insertion order, floats are written in scientific notation
//! with 12 significant digits, and the layout is fixed (two-space indent,
//! trailing newline), so identical inputs give byte-identical output.

use bkvg_core::{CertStatus, Certified, MonomialSum};
use num_complex::Complex64;

pub const SCHEMA: &str = "bkvg-report/1";

#[derive(Clone, Debug, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn object() -> ObjectBuilder {
        ObjectBuilder(Vec::new())
    }

    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    pub fn complex(z: Complex64) -> Json {
        Json::object().field("re", z.re).field("im", z.im).build()
    }

    /// A numeric value tagged with how it was established.
    pub fn tagged(value: impl Into<Json>, status: CertStatus) -> Json {
        Json::object()
            .field("value", value)
            .field("status", status.name())
            .build()
    }

    pub fn certified_real(c: &Certified<f64>) -> Json {
        Json::object()
            .field("value", c.value)
            .field("status", c.status.name())
            .field("closed_form", c.closed_form)
            .field("oracle", c.oracle.map(Json::Float).unwrap_or(Json::Null))
            .build()
    }

    pub fn certified_complex(c: &Certified<Complex64>) -> Json {
        Json::object()
            .field("value", Json::complex(c.value))
            .field("status", c.status.name())
            .field("closed_form", Json::complex(c.closed_form))
            .field("oracle", c.oracle.map(Json::complex).unwrap_or(Json::Null))
            .build()
    }

    pub fn monomial_sum(f: &MonomialSum) -> Json {
        Json::Array(
            f.terms()
                .iter()
                .map(|t| {
                    Json::object()
                        .field("coeff", Json::complex(t.coeff))
                        .field("exponent", Json::complex(t.exponent))
                        .build()
                })
                .collect(),
        )
    }

    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Float(x) => out.push_str(&format_float(*x)),
            Json::Str(s) => out.push_str(&serde_json::to_string(s).expect("string serialization")),
            Json::Array(items) if items.is_empty() => out.push_str("[]"),
            Json::Array(items) => {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    newline(out, depth + 1);
                    item.write(out, depth + 1);
                }
                newline(out, depth);
                out.push(']');
            }
            Json::Object(fields) if fields.is_empty() => out.push_str("{}"),
            Json::Object(fields) => {
                out.push('{');
                for (k, (key, value)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    newline(out, depth + 1);
                    out.push_str(&serde_json::to_string(key).expect("string serialization"));
                    out.push_str(": ");
                    value.write(out, depth + 1);
                }
                newline(out, depth);
                out.push('}');
            }
        }
    }
}

fn newline(out: &mut String, depth: usize) {
    out.push('\n');
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// Scientific notation with 12 significant digits; non-finite values
/// become the strings `"+inf"`, `"-inf"` and `"nan"`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".into()
    } else if x.is_infinite() {
        if x > 0.0 { "\"+inf\"" } else { "\"-inf\"" }.into()
    } else {
        // Normalize -0 so that sign noise never changes the bytes.
        let x = if x == 0.0 { 0.0 } else { x };
        format!("{x:.11e}")
    }
}

pub struct ObjectBuilder(Vec<(String, Json)>);

impl ObjectBuilder {
    pub fn field(mut self, key: &str, value: impl Into<Json>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn build(self) -> Json {
        Json::Object(self.0)
    }
}

impl From<bool> for Json {
    fn from(b: bool) -> Self {
        Json::Bool(b)
    }
}

impl From<f64> for Json {
    fn from(x: f64) -> Self {
        Json::Float(x)
    }
}

impl From<usize> for Json {
    fn from(n: usize) -> Self {
        Json::Int(n as i64)
    }
}

impl From<u8> for Json {
    fn from(n: u8) -> Self {
        Json::Int(n.into())
    }
}

impl From<&str> for Json {
    fn from(s: &str) -> Self {
        Json::Str(s.to_string())
    }
}

impl From<String> for Json {
    fn from(s: String) -> Self {
        Json::Str(s)
    }
}

impl<T: Into<Json>> From<Option<T>> for Json {
    fn from(v: Option<T>) -> Self {
        v.map_or(Json::Null, Into::into)
    }
}

impl<T: Into<Json>> From<Vec<T>> for Json {
    fn from(v: Vec<T>) -> Self {
        Json::Array(v.into_iter().map(Into::into).collect())
    }
}

/// The versioned top-level report.
pub fn envelope(command: &str, config: Json, payload: Json, warnings: Vec<String>) -> Json {
    Json::object()
        .field("schema", SCHEMA)
        .field("tool_version", env!("CARGO_PKG_VERSION"))
        .field("command", command)
        .field("config", config)
        .field("payload", payload)
        .field("warnings", warnings)
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_twelve_significant_digits() {
        assert_eq!(format_float(1.0), "1.00000000000e0");
        assert_eq!(format_float(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(format_float(-0.0), "0.00000000000e0");
        assert_eq!(format_float(f64::INFINITY), "\"+inf\"");
        for x in [1.0, -2.5e-300, 6.02214076e23] {
            let parsed: f64 = format_float(x).parse().unwrap();
            assert!(((parsed - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn pretty_output_is_valid_json() {
        let doc = Json::object()
            .field("a", 1.5)
            .field("b", vec![Json::Null, Json::from(true)])
            .field("c", Json::object().build())
            .field("s", "quote \" and\nnewline")
            .build();
        let text = doc.to_pretty();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["a"], 1.5);
        assert_eq!(parsed["s"], "quote \" and\nnewline");
        let keys: Vec<_> = parsed.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["a", "b", "c", "s"]);
        assert!(text.ends_with("}\n"));
    }
}
