use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A result table with a self-describing header.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub command: &'static str,
    pub metadata: Vec<(String, Value)>,
    pub summary: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(
        command: &'static str,
        columns: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        Self {
            command,
            columns: columns.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tsichain {}", self.command);
        for (k, v) in self.metadata.iter().chain(&self.summary) {
            let _ = writeln!(out, "# {k} = {}", render_value(v));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(render_value).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let object =
            |pairs: &[(String, Value)]| Value::Object(pairs.iter().cloned().collect::<Map<_, _>>());
        let mut metadata = vec![("command".to_string(), Value::from(self.command))];
        metadata.extend(self.metadata.iter().cloned());
        let rows = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(row.iter().cloned())
                        .collect(),
                )
            })
            .collect();
        let doc = Value::Object(
            [
                ("metadata".to_string(), object(&metadata)),
                ("summary".to_string(), object(&self.summary)),
                ("columns".to_string(), Value::from(self.columns.clone())),
                ("rows".to_string(), Value::Array(rows)),
            ]
            .into_iter()
            .collect(),
        );
        let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
        s.push('\n');
        s
    }

    /// Summary as `key = value` lines.
    pub fn summary_lines(&self) -> Vec<String> {
        self.summary
            .iter()
            .map(|(k, v)| format!("{k} = {}", render_value(v)))
            .collect()
    }
}

/// A JSON number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(normalize_zero(x)).map_or(Value::Null, Value::Number)
}

pub fn opt_num(x: Option<f64>, missing: &str) -> Value {
    x.map_or_else(|| Value::from(missing), num)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn normalize_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Null => "nan".to_string(),
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), fmt_g12),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(render_value).collect();
            format!("[{}]", parts.join(" "))
        }
        Value::Object(_) => v.to_string(),
    }
}

/// `printf("%.12g")`.
pub fn fmt_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = normalize_zero(x);
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `contents` to `path`, or to stdout when no path is given.
pub fn emit(contents: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()
        }
    }
}
