//! Machine-readable reports: JSON objects with keys in insertion order, or
//! CSV with a header row. Reals carry 12 significant digits, so identical
//! inputs give byte-identical output.

use std::io::Write;
use std::path::Path;

use latsmooth_core::decision::{DecisionReport, Evidence};
use latsmooth_core::estimate::ProbEstimate;
use latsmooth_core::gauss::{CertifiedSum, SmoothingResult};
use latsmooth_core::geometry::{Comparison, OverlapRadii, SandwichReport};
use serde_json::{Map, Number, Value as Json};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("CSV encoding failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Uint(u64),
    Bool(bool),
    Str(String),
    List(Vec<Value>),
    Obj(Record),
}

/// Ordered key/value fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, Value)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Appends every field of `other`.
    pub fn extend(mut self, other: Record) -> Self {
        self.0.extend(other.0);
        self
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}
impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Uint(v)
    }
}
impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Uint(v as u64)
    }
}
impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Uint(v.into())
    }
}
impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}
impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}
impl From<Record> for Value {
    fn from(v: Record) -> Self {
        Value::Obj(v)
    }
}
impl From<&[f64]> for Value {
    fn from(v: &[f64]) -> Self {
        Value::List(v.iter().map(|&x| Value::Num(x)).collect())
    }
}

/// A report: scalar fields, optionally followed by a table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub record: Record,
    pub table: Option<Table>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl From<Record> for Report {
    fn from(record: Record) -> Self {
        Report { record, table: None }
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().expect("formatted float parses")
    } else {
        x
    }
}

fn json_num(x: f64) -> Json {
    Number::from_f64(round12(x)).map_or(Json::Null, Json::Number)
}

fn to_json(v: &Value) -> Json {
    match v {
        Value::Num(x) => json_num(*x),
        Value::Int(i) => Json::from(*i),
        Value::Uint(u) => Json::from(*u),
        Value::Bool(b) => Json::Bool(*b),
        Value::Str(s) => Json::String(s.clone()),
        Value::List(items) => Json::Array(items.iter().map(to_json).collect()),
        Value::Obj(r) => record_json(r),
    }
}

fn record_json(r: &Record) -> Json {
    Json::Object(r.0.iter().map(|(k, v)| (k.clone(), to_json(v))).collect::<Map<_, _>>())
}

/// Scalar text for CSV cells: the JSON spelling, without quotes for strings.
fn cell(v: &Value) -> String {
    match v {
        Value::Str(s) => s.clone(),
        Value::List(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        Value::Obj(_) => to_json(v).to_string(),
        _ => to_json(v).to_string(),
    }
}

/// Nested records become `outer_inner` columns.
fn flatten(prefix: &str, r: &Record, out: &mut Vec<(String, String)>) {
    for (k, v) in &r.0 {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}_{k}") };
        match v {
            Value::Obj(inner) => flatten(&key, inner, out),
            _ => out.push((key, cell(v))),
        }
    }
}

impl Report {
    pub fn new(record: Record) -> Self {
        record.into()
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn to_json(&self) -> String {
        let mut obj = match record_json(&self.record) {
            Json::Object(m) => m,
            _ => unreachable!(),
        };
        if let Some(t) = &self.table {
            let rows = t
                .rows
                .iter()
                .map(|row| Json::Object(t.columns.iter().cloned().zip(row.iter().map(to_json)).collect()))
                .collect();
            obj.insert("rows".to_string(), Json::Array(rows));
        }
        let mut s = Json::Object(obj).to_string();
        s.push('\n');
        s
    }

    /// The table when there is one, else the record as a single row.
    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.columns)?;
                for row in &t.rows {
                    w.write_record(row.iter().map(cell))?;
                }
            }
            None => {
                let mut flat = Vec::new();
                flatten("", &self.record, &mut flat);
                w.write_record(flat.iter().map(|(k, _)| k))?;
                w.write_record(flat.iter().map(|(_, v)| v))?;
            }
        }
        let bytes =
            w.into_inner().map_err(|e| ReportError::Write { path: "<memory>".into(), source: e.into_error() })?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"))
    }

    pub fn render(&self, format: Format) -> Result<String, ReportError> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Writes the rendered report to `path`, or to `out` when there is none.
pub fn emit_report(
    report: &Report,
    format: Format,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), ReportError> {
    let text = report.render(format)?;
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|source| ReportError::Write { path: p.display().to_string(), source })
        }
        None => out.write_all(text.as_bytes()).map_err(|source| ReportError::Write { path: "<stdout>".into(), source }),
    }
}

impl From<&ProbEstimate> for Record {
    fn from(p: &ProbEstimate) -> Self {
        Record::new().with("mean", p.mean).with("halfwidth", p.halfwidth).with("trials", p.trials).with("seed", p.seed)
    }
}

impl From<&SandwichReport> for Record {
    fn from(r: &SandwichReport) -> Self {
        Record::new()
            .with("lower", r.lower)
            .with("middle", Record::from(&r.middle))
            .with("upper", r.upper)
            .with("satisfied", r.satisfied)
            .with("status", r.status.as_str())
    }
}

impl From<&Comparison> for Record {
    fn from(c: &Comparison) -> Self {
        Record::new()
            .with("left", c.left)
            .with("left_halfwidth", c.left_halfwidth)
            .with("right", c.right)
            .with("right_halfwidth", c.right_halfwidth)
            .with("trials", c.trials)
            .with("satisfied", c.satisfied)
            .with("status", c.status.as_str())
    }
}

impl From<&CertifiedSum> for Record {
    fn from(c: &CertifiedSum) -> Self {
        Record::new()
            .with("value", c.value)
            .with("tail_bound", c.tail_bound)
            .with("s", c.s)
            .with("radius", c.radius)
            .with("points", c.points)
    }
}

impl From<&SmoothingResult> for Record {
    fn from(r: &SmoothingResult) -> Self {
        Record::new()
            .with("eta", r.eta)
            .with("eps", r.eps)
            .with("bracket_lo", r.bracket.0)
            .with("bracket_hi", r.bracket.1)
            .with("rtol", r.rtol)
            .with("log_slope", r.log_slope)
            .with("iterations", r.iterations)
    }
}

impl From<&OverlapRadii> for Record {
    fn from(r: &OverlapRadii) -> Self {
        Record::new()
            .with("r_eps", r.r_eps)
            .with("r_upper", r.r_upper)
            .with("delta", r.delta)
            .with("eta_dual", r.eta_dual)
            .with("upper_regime", r.upper_regime)
            .with("eps_above_floor", r.eps_above_floor)
    }
}

impl From<&DecisionReport> for Record {
    fn from(d: &DecisionReport) -> Self {
        let r = Record::new().with("verdict", d.verdict.as_str());
        match &d.evidence {
            Evidence::Det(e) => {
                let r = r
                    .with("sum_u", e.sum_u)
                    .with("point_count", e.point_count)
                    .with("threshold", e.threshold)
                    .with("early_abort", e.early_abort)
                    .with("abort_cap", e.abort_cap)
                    .with("radius", e.radius)
                    .with("separated", e.separated)
                    .with("promise", e.promise.as_str());
                match &e.certified {
                    Some(c) => r.with("certified", Record::from(c)),
                    None => r,
                }
            }
            Evidence::Bdd(e) => r
                .with("rejection", Record::from(&e.rejection))
                .with("threshold", e.threshold)
                .with("decoding_radius", e.decoding_radius),
        }
    }
}
