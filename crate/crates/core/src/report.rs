//! The `oelab/1` report schema: JSON and CSV serialisation of results.
//!
//! Integers are JSON numbers of arbitrary size, rationals are
//! `{"num": …, "den": …}` objects, and object keys are sorted, so identical
//! inputs always produce identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{Map, Number, Value as Json};

use crate::bounds::{BoundReport, Direction, Verdict};
use crate::constructions::ConstructionSpec;
use crate::decomposition::PeelingTrace;
use crate::error::{Error, Result};
use crate::family::{build_odd_pair_graph, op_count, write_family, SetFamily};
use crate::search::SearchResult;
use crate::spectral::FourierDiagnostic;

pub const SCHEMA: &str = "oelab/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReportKind {
    Bound,
    Search,
    Peeling,
    Spectral,
    Construction,
    Graph,
}

impl ReportKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportKind::Bound => "bound",
            ReportKind::Search => "search",
            ReportKind::Peeling => "peeling",
            ReportKind::Spectral => "spectral",
            ReportKind::Construction => "construction",
            ReportKind::Graph => "graph",
        }
    }
}

impl FromStr for ReportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ReportKind::Bound,
            ReportKind::Search,
            ReportKind::Peeling,
            ReportKind::Spectral,
            ReportKind::Construction,
            ReportKind::Graph,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| Error::MalformedReport(format!("unknown kind {s:?}")))
    }
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(BigInt),
    Rational(BigRational),
    Bool(bool),
    Text(String),
    List(Vec<Value>),
}

impl Value {
    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Value::Int(i) => Some(BigRational::from_integer(i.clone())),
            Value::Rational(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(t) => Some(t),
            _ => None,
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Int(i) => Json::Number(big_number(i)),
            Value::Rational(r) => {
                let mut m = Map::new();
                m.insert("den".into(), Json::Number(big_number(r.denom())));
                m.insert("num".into(), Json::Number(big_number(r.numer())));
                Json::Object(m)
            }
            Value::Bool(b) => Json::Bool(*b),
            Value::Text(t) => Json::String(t.clone()),
            Value::List(items) => Json::Array(items.iter().map(Value::to_json).collect()),
        }
    }

    fn from_json(j: &Json) -> Result<Value> {
        Ok(match j {
            Json::Number(n) => Value::Int(parse_int(n)?),
            Json::Bool(b) => Value::Bool(*b),
            Json::String(s) => Value::Text(s.clone()),
            Json::Array(items) => Value::List(items.iter().map(Value::from_json).collect::<Result<_>>()?),
            Json::Object(m) => {
                let get = |k: &str| match m.get(k) {
                    Some(Json::Number(n)) => parse_int(n),
                    _ => Err(Error::MalformedReport(format!("rational without integer {k:?}"))),
                };
                if m.len() != 2 {
                    return Err(Error::MalformedReport("rational needs exactly num and den".into()));
                }
                let den = get("den")?;
                if den.is_zero() {
                    return Err(Error::MalformedReport("zero denominator".into()));
                }
                Value::Rational(BigRational::new(get("num")?, den))
            }
            Json::Null => return Err(Error::MalformedReport("null value".into())),
        })
    }

    fn to_csv(&self, kind: ReportKind) -> Result<String> {
        Ok(match self {
            Value::Int(i) => i.to_string(),
            Value::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
            Value::Bool(b) => b.to_string(),
            Value::Text(t) => csv_text(t),
            Value::List(_) => {
                return Err(Error::UnsupportedFormat {
                    kind: kind.to_string(),
                    format: "csv".into(),
                })
            }
        })
    }
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl From<$t> for Value {
            fn from(v: $t) -> Self {
                Value::Int(BigInt::from(v))
            }
        }
    )*};
}
int_value!(u32, u64, usize, i64, u128);

impl From<BigInt> for Value {
    fn from(v: BigInt) -> Self {
        Value::Int(v)
    }
}

impl From<BigRational> for Value {
    fn from(v: BigRational) -> Self {
        Value::Rational(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
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

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(v: Vec<T>) -> Self {
        Value::List(v.into_iter().map(Into::into).collect())
    }
}

fn big_number(i: &BigInt) -> Number {
    Number::from_str(&i.to_string()).expect("integers are valid JSON numbers")
}

fn parse_int(n: &Number) -> Result<BigInt> {
    BigInt::from_str(&n.to_string()).map_err(|_| Error::MalformedReport(format!("non-integer number {n}")))
}

fn csv_text(t: &str) -> String {
    if t.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", t.replace('"', "\"\""))
    } else {
        t.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    CsvRow,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" | "csv-row" => Ok(Format::CsvRow),
            _ => Err(Error::InvalidParameters(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub kind: ReportKind,
    pub parameters: BTreeMap<String, Value>,
    pub values: BTreeMap<String, Value>,
    pub verdict: Option<Verdict>,
    pub witness_path: Option<String>,
    /// Witness family in the text format.
    pub witness: Option<String>,
}

impl Report {
    pub fn new(kind: ReportKind) -> Self {
        Report {
            kind,
            parameters: BTreeMap::new(),
            values: BTreeMap::new(),
            verdict: None,
            witness_path: None,
            witness: None,
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), v.into());
        self
    }

    pub fn value(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.values.insert(key.to_string(), v.into());
        self
    }

    fn param_opt(self, key: &str, v: Option<impl Into<Value>>) -> Self {
        match v {
            Some(v) => self.param(key, v),
            None => self,
        }
    }

    fn value_opt(self, key: &str, v: Option<impl Into<Value>>) -> Self {
        match v {
            Some(v) => self.value(key, v),
            None => self,
        }
    }

    pub fn to_json(&self) -> Json {
        let mut m = Map::new();
        m.insert("schema".into(), SCHEMA.into());
        m.insert("kind".into(), self.kind.as_str().into());
        let section = |map: &BTreeMap<String, Value>| {
            Json::Object(map.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
        };
        m.insert("parameters".into(), section(&self.parameters));
        m.insert("values".into(), section(&self.values));
        if let Some(v) = self.verdict {
            m.insert("verdict".into(), v.as_str().into());
        }
        if let Some(p) = &self.witness_path {
            m.insert("witness_path".into(), p.clone().into());
        }
        if let Some(w) = &self.witness {
            m.insert("witness".into(), w.clone().into());
        }
        Json::Object(m)
    }

    pub fn from_json(j: &Json) -> Result<Report> {
        let m = j
            .as_object()
            .ok_or_else(|| Error::MalformedReport("top level is not an object".into()))?;
        let text = |k: &str| -> Result<Option<String>> {
            match m.get(k) {
                None => Ok(None),
                Some(Json::String(s)) => Ok(Some(s.clone())),
                Some(_) => Err(Error::MalformedReport(format!("{k} is not a string"))),
            }
        };
        match text("schema")?.as_deref() {
            Some(SCHEMA) => {}
            other => return Err(Error::MalformedReport(format!("unsupported schema {other:?}"))),
        }
        let kind: ReportKind = text("kind")?
            .ok_or_else(|| Error::MalformedReport("missing kind".into()))?
            .parse()?;
        let section = |k: &str| -> Result<BTreeMap<String, Value>> {
            match m.get(k) {
                Some(Json::Object(o)) => o.iter().map(|(k, v)| Ok((k.clone(), Value::from_json(v)?))).collect(),
                _ => Err(Error::MalformedReport(format!("missing object {k:?}"))),
            }
        };
        for key in m.keys() {
            if !["schema", "kind", "parameters", "values", "verdict", "witness_path", "witness"].contains(&key.as_str()) {
                return Err(Error::MalformedReport(format!("unknown field {key:?}")));
            }
        }
        Ok(Report {
            kind,
            parameters: section("parameters")?,
            values: section("values")?,
            verdict: text("verdict")?.map(|v| v.parse()).transpose()?,
            witness_path: text("witness_path")?,
            witness: text("witness")?,
        })
    }

    fn csv_columns(&self) -> impl Iterator<Item = String> + '_ {
        self.parameters
            .keys()
            .map(|k| format!("param.{k}"))
            .chain(self.values.keys().cloned())
    }

    fn csv_cell(&self, column: &str) -> Result<String> {
        let v = match column.strip_prefix("param.") {
            Some(k) => self.parameters.get(k),
            None => self.values.get(column),
        };
        v.map_or(Ok(String::new()), |v| v.to_csv(self.kind))
    }
}

/// Serialises one report. `CsvRow` yields a header line and one data line.
pub fn emit_report(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("JSON values serialise");
            s.push('\n');
            Ok(s)
        }
        Format::CsvRow => emit_csv(std::slice::from_ref(report)),
    }
}

pub fn parse_report(text: &str) -> Result<Report> {
    let j: Json = serde_json::from_str(text).map_err(|e| Error::MalformedReport(e.to_string()))?;
    Report::from_json(&j)
}

/// CSV table of reports: a header built from the union of their keys, then
/// one row per report in the given order.
pub fn emit_csv(reports: &[Report]) -> Result<String> {
    for r in reports {
        if r.kind == ReportKind::Peeling {
            return Err(Error::UnsupportedFormat {
                kind: r.kind.to_string(),
                format: "csv".into(),
            });
        }
    }
    let columns: BTreeSet<String> = reports.iter().flat_map(Report::csv_columns).collect();
    // Parameters first, then values, each sorted.
    let (params, values): (Vec<_>, Vec<_>) = columns.into_iter().partition(|c| c.starts_with("param."));
    let columns: Vec<String> = params.into_iter().chain(values).collect();
    let mut out = String::from("kind");
    for c in &columns {
        out.push(',');
        out.push_str(c);
    }
    out.push_str(",verdict\n");
    for r in reports {
        out.push_str(r.kind.as_str());
        for c in &columns {
            out.push(',');
            out.push_str(&r.csv_cell(c)?);
        }
        out.push(',');
        if let Some(v) = r.verdict {
            out.push_str(v.as_str());
        }
        out.push('\n');
    }
    Ok(out)
}

impl From<&BoundReport> for Report {
    fn from(b: &BoundReport) -> Self {
        let direction = match b.direction {
            Direction::Lower => "lower",
            Direction::Upper => "upper",
        };
        let mut r = Report::new(ReportKind::Bound)
            .param("bound", b.bound_name.as_str())
            .param("n", b.n)
            .param("family_size", b.family_size)
            .param("direction", direction)
            .param("strict", b.strict)
            .param_opt("s", b.s)
            .param_opt("epsilon", b.epsilon.clone())
            .param_opt("r", b.r)
            .param_opt("strength", b.strength.map(|s| s.as_str()))
            .param_opt("note", b.note.clone())
            .value_opt("bound_value", b.bound_value.clone())
            .value_opt("observed_value", b.observed_value.clone())
            .value_opt("slack", b.slack.clone());
        r.verdict = Some(b.verdict);
        r
    }
}

impl From<&SearchResult> for Report {
    fn from(s: &SearchResult) -> Self {
        let mut r = Report::new(ReportKind::Search)
            .param("n", s.n)
            .param("size", s.size)
            .param("mode", s.mode.as_str())
            .param("canonical", s.canonical)
            .param("budget", s.budget)
            .param_opt("s", s.s())
            .value_opt("minimum_op", s.minimum_op)
            .value("explored", s.explored)
            .value("pruned", s.pruned)
            .value("exhaustive", s.exhaustive);
        r.witness = s.witness.as_ref().map(write_family);
        r
    }
}

impl From<&PeelingTrace> for Report {
    fn from(t: &PeelingTrace) -> Self {
        let mut r = Report::new(ReportKind::Peeling)
            .param("n", t.n)
            .param("mode", t.mode.as_str())
            .param("exactness", t.exactness.as_str())
            .param("family_size", t.layers.iter().map(Vec::len).sum::<usize>())
            .value("layers", t.layers.clone())
            .value("layer_sizes", t.layers.iter().map(Vec::len).collect::<Vec<_>>())
            .value("residual_sizes", t.residual_sizes.clone())
            .value("bound", t.bound());
        if let Some(ctx) = &t.eventown {
            r = r
                .value_opt("eventown_s", ctx.s)
                .value_opt("alpha", ctx.alpha)
                .value_opt("alpha_precondition_holds", ctx.precondition_holds)
                .value_opt("first_layer_at_least_alpha", ctx.first_layer_at_least_alpha);
        }
        r
    }
}

impl PeelingTrace {
    /// Report with the observed odd pair number and a verdict on the bound.
    pub fn report_for(&self, family: &SetFamily) -> Report {
        let op = op_count(family);
        let mut r = Report::from(self).value("op", op);
        r.verdict = Some(if self.bound() <= op { Verdict::Holds } else { Verdict::Violated });
        r
    }
}

impl FourierDiagnostic {
    /// Report; per-character numerators are included when `coefficients` is set.
    pub fn report(&self, coefficients: bool) -> Report {
        let mut r = Report::new(ReportKind::Spectral)
            .param("n", self.n)
            .param("mode", self.mode.as_str())
            .param("coefficient_log_den", self.coefficient_log_den)
            .value("v", self.v)
            .value("e", self.e)
            .value("v_odd", self.v_odd)
            .value("plancherel_lhs", self.plancherel_lhs.clone())
            .value_opt("plancherel_rhs", self.plancherel_rhs.clone())
            .value("concentration_lhs", self.concentration_lhs.clone())
            .value("concentration_lhs_squared", self.concentration_lhs_squared.clone())
            .value("concentration_rhs_squared", self.concentration_rhs_squared.clone());
        if coefficients && !self.coefficients.is_empty() {
            r = r
                .value("characters", self.coefficients.iter().map(|(m, _)| m.bits()).collect::<Vec<_>>())
                .value("coefficient_numerators", self.coefficients.iter().map(|&(_, s)| s).collect::<Vec<_>>());
        }
        let ok = self.concentration_holds && self.plancherel_holds() != Some(false);
        r.verdict = Some(if ok { Verdict::Holds } else { Verdict::Violated });
        r
    }
}

/// Report describing a constructed family, with the family inline.
pub fn construction_report(spec: &ConstructionSpec, family: &SetFamily) -> Report {
    let mut r = Report::new(ReportKind::Construction)
        .param("construction", spec.kind.as_str())
        .param_opt("n", spec.n)
        .param_opt("s", spec.s)
        .param_opt("m", spec.m)
        .value("ground_set", family.n())
        .value("size", family.len())
        .value("op", op_count(family))
        .value("parity", family.parity_profile().as_str());
    r.witness = Some(write_family(family));
    r
}

/// Vertex and edge counts of H(A) with its degree histogram.
pub fn graph_report(family: &SetFamily) -> Report {
    let g = build_odd_pair_graph(family);
    let histogram: Vec<Value> = g
        .degree_histogram()
        .into_iter()
        .map(|(d, c)| Value::List(vec![d.into(), c.into()]))
        .collect();
    Report::new(ReportKind::Graph)
        .param("n", family.n())
        .value("v", g.vertex_count())
        .value("e", g.edge_count())
        .value("v_odd", g.odd_vertex_count())
        .value("degree_histogram", Value::List(histogram))
}
