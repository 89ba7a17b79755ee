//! Deterministic report rendering: a tiny JSON tree with fixed key
//! order and a CSV table writer, both byte-stable across runs.
//!
//! Golden-file testing demands that identical inputs produce identical
//! bytes, so nothing here consults a hash map or locale: objects keep
//! their insertion order, floats are always printed with 17 significant
//! digits (enough to round-trip any `f64`), and CSV rows end in a bare
//! LF. Non-finite floats have no JSON literal and are emitted as the
//! strings `"inf"`, `"-inf"`, `"nan"`.

use num_bigint::BigUint;

use crate::scalar::Scalar;

/// Fixed float formatting: 17 significant digits in scientific
/// notation, identical in JSON and CSV cells.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

/// A JSON value with insertion-ordered objects.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i128),
    Float(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    /// Empty object, extended with [`Json::push`].
    pub fn obj() -> Self {
        Json::Obj(Vec::new())
    }

    /// Appends a key; panics if called on a non-object (programmer
    /// error, never input-dependent).
    pub fn push(mut self, key: &str, value: Json) -> Self {
        match &mut self {
            Json::Obj(pairs) => pairs.push((key.to_string(), value)),
            _ => unreachable!("push on non-object"),
        }
        self
    }

    /// Finite floats as numbers, non-finite as strings.
    pub fn float(v: f64) -> Self {
        if v.is_finite() {
            Json::Float(v)
        } else {
            Json::Str(fmt_f64(v))
        }
    }

    pub fn str(s: impl Into<String>) -> Self {
        Json::Str(s.into())
    }

    /// Big counts as decimal strings: they routinely exceed both u64
    /// and f64 exactness.
    pub fn big(n: &BigUint) -> Self {
        Json::Str(n.to_string())
    }

    /// Backend-faithful scalar: a float JSON number for float scalars,
    /// the exact literal (`"119/300"`) for the rational backend.
    pub fn scalar<T: Scalar>(v: &T) -> Self {
        if T::EXACT {
            Json::Str(v.to_string())
        } else {
            Json::float(v.to_f64_lossy())
        }
    }

    pub fn scalars<T: Scalar>(vs: &[T]) -> Self {
        Json::Arr(vs.iter().map(Json::scalar).collect())
    }

    pub fn floats(vs: &[f64]) -> Self {
        Json::Arr(vs.iter().copied().map(Json::float).collect())
    }

    /// Pretty rendering: two-space indent, LF endings, no trailing
    /// newline (callers add one when printing a whole document).
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out
    }

    fn is_leaf(&self) -> bool {
        !matches!(self, Json::Arr(_) | Json::Obj(_))
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Float(v) => out.push_str(&fmt_f64(*v)),
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                } else if items.iter().all(Json::is_leaf) {
                    // Scalar arrays (vectors, grids) stay on one line.
                    out.push('[');
                    for (i, item) in items.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        item.write(out, indent);
                    }
                    out.push(']');
                } else {
                    out.push_str("[\n");
                    for (i, item) in items.iter().enumerate() {
                        if i > 0 {
                            out.push_str(",\n");
                        }
                        pad(out, indent + 1);
                        item.write(out, indent + 1);
                    }
                    out.push('\n');
                    pad(out, indent);
                    out.push(']');
                }
            }
            Json::Obj(pairs) => {
                if pairs.is_empty() {
                    out.push_str("{}");
                } else {
                    out.push_str("{\n");
                    for (i, (key, value)) in pairs.iter().enumerate() {
                        if i > 0 {
                            out.push_str(",\n");
                        }
                        pad(out, indent + 1);
                        write_escaped(out, key);
                        out.push_str(": ");
                        value.write(out, indent + 1);
                    }
                    out.push('\n');
                    pad(out, indent);
                    out.push('}');
                }
            }
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// A CSV table with a mandatory header row. Cells containing commas,
/// quotes, or newlines are quoted per RFC 4180 (our emitters never
/// produce such cells, but the writer stays total).
#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: Vec<String>) -> Self {
        Csv {
            header,
            rows: Vec::new(),
        }
    }

    /// Appends a row; panics on width mismatch (programmer error).
    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "csv row width");
        self.rows.push(cells);
    }

    /// LF line endings, '.' decimal separator (inherited from
    /// [`fmt_f64`]), trailing newline after the last row.
    pub fn render(&self) -> String {
        let mut out = String::new();
        write_csv_line(&mut out, &self.header);
        for row in &self.rows {
            write_csv_line(&mut out, row);
        }
        out
    }
}

fn write_csv_line(out: &mut String, cells: &[String]) {
    for (i, cell) in cells.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if cell.contains([',', '"', '\n', '\r']) {
            out.push('"');
            out.push_str(&cell.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(cell);
        }
    }
    out.push('\n');
}
