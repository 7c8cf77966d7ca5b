//! Tabular reports with CSV and JSON emission.
//!
//! Complex cells become two CSV columns (`name_re`, `name_im`) and `[re, im]`
//! arrays in JSON. Reals are written with the shortest representation that
//! parses back to the same value, so both formats round-trip.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qrw_core::C64;
use serde_json::{json, Map, Value as Json};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportKind {
    Amplitudes,
    Moments,
    Measure,
    Recurrence,
    Asymptotics,
    Compare,
}

impl ReportKind {
    pub fn name(self) -> &'static str {
        match self {
            ReportKind::Amplitudes => "amplitudes",
            ReportKind::Moments => "moments",
            ReportKind::Measure => "measure",
            ReportKind::Recurrence => "recurrence",
            ReportKind::Asymptotics => "asymptotics",
            ReportKind::Compare => "compare",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            ReportKind::Amplitudes,
            ReportKind::Moments,
            ReportKind::Measure,
            ReportKind::Recurrence,
            ReportKind::Asymptotics,
            ReportKind::Compare,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnType {
    Int,
    Real,
    Complex,
    Text,
    Bool,
}

impl ColumnType {
    fn name(self) -> &'static str {
        match self {
            ColumnType::Int => "int",
            ColumnType::Real => "real",
            ColumnType::Complex => "complex",
            ColumnType::Text => "text",
            ColumnType::Bool => "bool",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            ColumnType::Int,
            ColumnType::Real,
            ColumnType::Complex,
            ColumnType::Text,
            ColumnType::Bool,
        ]
        .into_iter()
        .find(|t| t.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub ty: ColumnType,
}

/// One cell; `Empty` is allowed in any column.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Complex(C64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<C64> for Value {
    fn from(v: C64) -> Self {
        Value::Complex(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Empty, Into::into)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub kind: ReportKind,
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
}

/// Shortest round-trip text for a real; exponent form outside `[1e-5, 1e16)`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn parse_real(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

fn real_json(x: f64) -> Json {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format_real(x))
    }
}

fn json_real(v: &Json) -> Option<f64> {
    match v {
        Json::Number(n) => n.as_f64(),
        Json::String(s) => parse_real(s),
        _ => None,
    }
}

fn bad(what: impl Into<String>) -> CliError {
    CliError::Parse(what.into())
}

impl Report {
    pub fn new(kind: ReportKind, columns: &[(&str, ColumnType)]) -> Self {
        Report {
            kind,
            metadata: BTreeMap::new(),
            columns: columns
                .iter()
                .map(|(n, t)| Column {
                    name: n.to_string(),
                    ty: *t,
                })
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        let _ = writeln!(out, "# kind={}", self.kind.name());
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={}", v.replace('\n', " "));
        }
        let types: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}:{}", c.name, c.ty.name()))
            .collect();
        let _ = writeln!(out, "# columns={}", types.join(","));

        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = Vec::new();
        for c in &self.columns {
            if c.ty == ColumnType::Complex {
                header.push(format!("{}_re", c.name));
                header.push(format!("{}_im", c.name));
            } else {
                header.push(c.name.clone());
            }
        }
        w.write_record(&header).map_err(|e| bad(e.to_string()))?;
        for row in &self.rows {
            let mut rec = Vec::with_capacity(header.len());
            for (c, v) in self.columns.iter().zip(row) {
                match (c.ty, v) {
                    (ColumnType::Complex, Value::Complex(z)) => {
                        rec.push(format_real(z.re));
                        rec.push(format_real(z.im));
                    }
                    (ColumnType::Complex, _) => {
                        rec.push(String::new());
                        rec.push(String::new());
                    }
                    (_, Value::Int(i)) => rec.push(i.to_string()),
                    (_, Value::Real(x)) => rec.push(format_real(*x)),
                    (_, Value::Text(s)) => rec.push(s.clone()),
                    (_, Value::Bool(b)) => rec.push(b.to_string()),
                    (_, Value::Complex(z)) => rec.push(format!("{}{:+}i", format_real(z.re), z.im)),
                    (_, Value::Empty) => rec.push(String::new()),
                }
            }
            w.write_record(&rec).map_err(|e| bad(e.to_string()))?;
        }
        let body = w.into_inner().map_err(|e| bad(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| bad(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let columns: Vec<Json> = self
            .columns
            .iter()
            .map(|c| json!({"name": c.name, "type": c.ty.name()}))
            .collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                Json::Array(
                    row.iter()
                        .map(|v| match v {
                            Value::Int(i) => json!(i),
                            Value::Real(x) => real_json(*x),
                            Value::Complex(z) => json!([real_json(z.re), real_json(z.im)]),
                            Value::Text(s) => json!(s),
                            Value::Bool(b) => json!(b),
                            Value::Empty => Json::Null,
                        })
                        .collect(),
                )
            })
            .collect();
        let metadata: Map<String, Json> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let doc = json!({
            "kind": self.kind.name(),
            "metadata": metadata,
            "columns": columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report is valid JSON");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc: Json = serde_json::from_str(text).map_err(|e| bad(format!("report JSON: {e}")))?;
        let kind = doc["kind"]
            .as_str()
            .and_then(ReportKind::parse)
            .ok_or_else(|| bad("report JSON: missing or unknown kind"))?;
        let metadata = doc["metadata"]
            .as_object()
            .ok_or_else(|| bad("report JSON: metadata must be an object"))?
            .iter()
            .map(|(k, v)| {
                Ok((
                    k.clone(),
                    v.as_str()
                        .ok_or_else(|| bad("metadata values are strings"))?
                        .to_string(),
                ))
            })
            .collect::<Result<BTreeMap<_, _>, CliError>>()?;
        let columns = doc["columns"]
            .as_array()
            .ok_or_else(|| bad("report JSON: columns must be an array"))?
            .iter()
            .map(|c| {
                let name = c["name"]
                    .as_str()
                    .ok_or_else(|| bad("column without name"))?;
                let ty = c["type"]
                    .as_str()
                    .and_then(ColumnType::parse)
                    .ok_or_else(|| bad(format!("column {name}: unknown type")))?;
                Ok(Column {
                    name: name.to_string(),
                    ty,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut rows = Vec::new();
        for (r, row) in doc["rows"]
            .as_array()
            .ok_or_else(|| bad("report JSON: rows must be an array"))?
            .iter()
            .enumerate()
        {
            let cells = row
                .as_array()
                .ok_or_else(|| bad(format!("row {r} is not an array")))?;
            if cells.len() != columns.len() {
                return Err(bad(format!(
                    "row {r} has {} cells, expected {}",
                    cells.len(),
                    columns.len()
                )));
            }
            let mut out = Vec::with_capacity(cells.len());
            for (c, v) in columns.iter().zip(cells) {
                let cell = if v.is_null() {
                    Value::Empty
                } else {
                    match c.ty {
                        ColumnType::Int => {
                            Value::Int(v.as_i64().ok_or_else(|| {
                                bad(format!("row {r} {}: not an integer", c.name))
                            })?)
                        }
                        ColumnType::Real => Value::Real(
                            json_real(v)
                                .ok_or_else(|| bad(format!("row {r} {}: not a number", c.name)))?,
                        ),
                        ColumnType::Complex => {
                            let pair = v.as_array().filter(|a| a.len() == 2);
                            let parts =
                                pair.and_then(|a| Some((json_real(&a[0])?, json_real(&a[1])?)));
                            let (re, im) = parts.ok_or_else(|| {
                                bad(format!("row {r} {}: expected [re, im]", c.name))
                            })?;
                            Value::Complex(C64::new(re, im))
                        }
                        ColumnType::Text => Value::Text(
                            v.as_str()
                                .ok_or_else(|| bad(format!("row {r} {}: not a string", c.name)))?
                                .to_string(),
                        ),
                        ColumnType::Bool => Value::Bool(
                            v.as_bool()
                                .ok_or_else(|| bad(format!("row {r} {}: not a boolean", c.name)))?,
                        ),
                    }
                };
                out.push(cell);
            }
            rows.push(out);
        }
        Ok(Report {
            kind,
            metadata,
            columns,
            rows,
        })
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut kind = None;
        let mut metadata = BTreeMap::new();
        let mut columns = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| bad(format!("comment without '=': {line}")))?;
                match k {
                    "kind" => kind = ReportKind::parse(v),
                    "columns" => {
                        for spec in v.split(',').filter(|s| !s.is_empty()) {
                            let (name, ty) = spec
                                .rsplit_once(':')
                                .ok_or_else(|| bad(format!("bad column spec {spec}")))?;
                            let ty = ColumnType::parse(ty)
                                .ok_or_else(|| bad(format!("unknown column type {ty}")))?;
                            columns.push(Column {
                                name: name.to_string(),
                                ty,
                            });
                        }
                    }
                    _ => {
                        metadata.insert(k.to_string(), v.to_string());
                    }
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let kind = kind.ok_or_else(|| bad("CSV report without kind"))?;
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let mut rows = Vec::new();
        for (r, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| bad(format!("CSV row {r}: {e}")))?;
            let mut it = rec.iter();
            let mut row = Vec::with_capacity(columns.len());
            for c in &columns {
                let mut next = || {
                    it.next()
                        .ok_or_else(|| bad(format!("CSV row {r}: too few fields")))
                };
                let cell = match c.ty {
                    ColumnType::Complex => {
                        let (re, im) = (next()?, next()?);
                        if re.is_empty() && im.is_empty() {
                            Value::Empty
                        } else {
                            let p = |s: &str| {
                                parse_real(s).ok_or_else(|| {
                                    bad(format!("CSV row {r} {}: bad number {s}", c.name))
                                })
                            };
                            Value::Complex(C64::new(p(re)?, p(im)?))
                        }
                    }
                    ty => {
                        let s = next()?;
                        if s.is_empty() && ty != ColumnType::Text {
                            Value::Empty
                        } else {
                            match ty {
                                ColumnType::Int => Value::Int(s.parse().map_err(|_| {
                                    bad(format!("CSV row {r} {}: bad integer {s}", c.name))
                                })?),
                                ColumnType::Real => {
                                    Value::Real(parse_real(s).ok_or_else(|| {
                                        bad(format!("CSV row {r} {}: bad number {s}", c.name))
                                    })?)
                                }
                                ColumnType::Bool => Value::Bool(s.parse().map_err(|_| {
                                    bad(format!("CSV row {r} {}: bad boolean {s}", c.name))
                                })?),
                                _ => {
                                    if s.is_empty() {
                                        Value::Empty
                                    } else {
                                        Value::Text(s.to_string())
                                    }
                                }
                            }
                        }
                    }
                };
                row.push(cell);
            }
            rows.push(row);
        }
        Ok(Report {
            kind,
            metadata,
            columns,
            rows,
        })
    }
}
