//! Deterministic text reports.
//!
//! A [`Report`] is an ordered list of entries rendered either for reading
//! (aligned tables, `key: value` items) or as one `key=value` per line.
//! Exact rationals always print as `a/b`; with `approx` a decimal follows.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::automata::MultiHeadNfa;
use crate::halting::HeadAnalysis;
use crate::ips::{OutcomeDistribution, StrongErrorReport};
use crate::ntmsim::ScalingRow;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Text(String),
    Int(i128),
    Rational(BigRational),
    Float(f64),
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Text(b.to_string())
    }
}

impl From<BigRational> for Value {
    fn from(r: BigRational) -> Self {
        Value::Rational(r)
    }
}

impl From<&BigRational> for Value {
    fn from(r: &BigRational) -> Self {
        Value::Rational(r.clone())
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl From<$t> for Value {
            fn from(n: $t) -> Self {
                Value::Int(n as i128)
            }
        }
    )*};
}
int_value!(u8, u16, u32, u64, usize, i32, i64);

/// `a/b`, with zero as `0/1` and integers as `n/1`.
pub fn rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl Value {
    fn render(&self, approx: bool) -> String {
        match self {
            Value::Text(s) => s.clone(),
            Value::Int(n) => n.to_string(),
            Value::Rational(r) if approx => format!("{} ({:.6})", rational(r), r.to_f64().unwrap_or(f64::NAN)),
            Value::Rational(r) => rational(r),
            Value::Float(x) => format!("{x:.4}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Style {
    pub machine_readable: bool,
    pub approx: bool,
}

#[derive(Clone, Debug)]
enum Entry {
    Item(String, Value),
    Equation(String, Value),
    Fields(Vec<(String, Value)>),
    Table {
        name: String,
        columns: Vec<String>,
        rows: Vec<Vec<Value>>,
    },
    Block(String, String),
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    entries: Vec<Entry>,
}

fn machine_key(key: &str) -> String {
    key.split_whitespace().collect::<Vec<_>>().join(".")
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// `key: value`, or `key=value` with spaces in the key turned into dots.
    pub fn item(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.entries.push(Entry::Item(key.into(), value.into()));
        self
    }

    /// `key = value`, or `key=value`.
    pub fn equation(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.entries.push(Entry::Equation(key.into(), value.into()));
        self
    }

    /// Fields sharing one line when rendered for reading.
    pub fn fields<K: Into<String>, V: Into<Value>>(mut self, fields: impl IntoIterator<Item = (K, V)>) -> Self {
        self.entries
            .push(Entry::Fields(fields.into_iter().map(|(k, v)| (k.into(), v.into())).collect()));
        self
    }

    pub fn table(mut self, name: impl Into<String>, columns: &[&str], rows: Vec<Vec<Value>>) -> Self {
        self.entries.push(Entry::Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        });
        self
    }

    /// Verbatim multi-line text, such as a serialized machine.
    pub fn block(mut self, key: impl Into<String>, text: impl Into<String>) -> Self {
        self.entries.push(Entry::Block(key.into(), text.into()));
        self
    }

    pub fn append(mut self, other: Report) -> Self {
        self.entries.extend(other.entries);
        self
    }

    pub fn render(&self, style: &Style) -> String {
        let mut out = String::new();
        let approx = style.approx;
        for e in &self.entries {
            match (e, style.machine_readable) {
                (Entry::Item(k, v), false) => out.push_str(&format!("{k}: {}\n", v.render(approx))),
                (Entry::Item(k, v) | Entry::Equation(k, v), true) => machine_line(&mut out, &machine_key(k), v, approx),
                (Entry::Equation(k, v), false) => out.push_str(&format!("{k} = {}\n", v.render(approx))),
                (Entry::Fields(fs), false) => {
                    let parts: Vec<String> = fs.iter().map(|(k, v)| format!("{k}={}", v.render(approx))).collect();
                    out.push_str(&parts.join(" "));
                    out.push('\n');
                }
                (Entry::Fields(fs), true) => {
                    for (k, v) in fs {
                        machine_line(&mut out, &machine_key(k), v, approx);
                    }
                }
                (Entry::Table { columns, rows, .. }, false) => {
                    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| v.render(approx)).collect()).collect();
                    let widths: Vec<usize> = (0..columns.len())
                        .map(|c| cells.iter().map(|r| r.get(c).map_or(0, String::len)).chain([columns[c].len()]).max().unwrap())
                        .collect();
                    let line = |row: &[String]| {
                        let padded: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:>w$}")).collect();
                        padded.join("  ").trim_end().to_string() + "\n"
                    };
                    out.push_str(&line(columns));
                    for r in &cells {
                        out.push_str(&line(r));
                    }
                }
                (Entry::Table { name, columns, rows }, true) => {
                    out.push_str(&format!("{name}.rows={}\n", rows.len()));
                    for (i, r) in rows.iter().enumerate() {
                        for (c, v) in columns.iter().zip(r) {
                            machine_line(&mut out, &format!("{name}.{i}.{c}"), v, approx);
                        }
                    }
                }
                (Entry::Block(_, text), false) => {
                    out.push_str(text);
                    if !text.ends_with('\n') {
                        out.push('\n');
                    }
                }
                (Entry::Block(k, text), true) => {
                    for (i, l) in text.lines().enumerate() {
                        out.push_str(&format!("{}.{i}={l}\n", machine_key(k)));
                    }
                }
            }
        }
        out
    }
}

fn machine_line(out: &mut String, key: &str, v: &Value, approx: bool) {
    out.push_str(&format!("{key}={}\n", v.render(false)));
    if let (true, Value::Rational(r)) = (approx, v) {
        out.push_str(&format!("{key}.approx={:.6}\n", r.to_f64().unwrap_or(f64::NAN)));
    }
}

pub fn distribution_report(d: &OutcomeDistribution) -> Report {
    Report::new().fields([("accept", &d.accept), ("reject", &d.reject), ("loop", &d.looping)])
}

/// One `head i: safe|risky` line per head, plus whatever evidence the analysis found.
pub fn safety_report(m: &MultiHeadNfa, analyses: &[HeadAnalysis]) -> Report {
    let mut r = Report::new();
    for a in analyses {
        r = r.item(format!("head {}", a.head), if a.safe { "safe" } else { "risky" });
        if let Some(x) = &a.counterexample {
            r = r.item(format!("head {} nonhalting input", a.head), quoted(m, x));
        }
    }
    r
}

/// A word between quotes, so that the empty word stays visible.
pub fn quoted(m: &MultiHeadNfa, x: &[crate::automata::Symbol]) -> String {
    format!("\"{}\"", m.alphabet().render_word(x))
}

pub fn scaling_table(rows: &[ScalingRow]) -> Report {
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.n.into(),
                r.window.into(),
                r.simulated_steps.into(),
                r.steps.into(),
                r.recaches.into(),
                r.ratio.into(),
            ]
        })
        .collect();
    Report::new().table("scaling", &["n", "W", "simulated", "steps", "recaches", "ratio"], body)
}

pub fn error_report(m: &MultiHeadNfa, e: &StrongErrorReport) -> Report {
    let mut r = Report::new()
        .item("nonmembers", e.rows.len())
        .equation("weak_error", &e.weak)
        .equation("strong_error", &e.strong)
        .equation("weak_bound", &e.weak_bound)
        .equation("strong_bound", &e.strong_bound)
        .equation("within_bounds", e.within_bounds());
    if let Some(w) = &e.worst {
        r = r.equation("worst_input", quoted(m, w));
    }
    r
}
