//! JSON documents: a header fixing the context and one payload.
//!
//! ```text
//! {"v":1,"p":3,"n":1,"m":3,"umax":5,"form":[{"c":[3,0],"k":[[1,1]],"I":[]}]}
//! ```
//!
//! A coefficient is `[num, pexp]` or `[num, pexp, den]` and stands for
//! `num / (den * p^pexp)`; `num` is written as a string once it leaves the
//! `i64` range. Weights are lists of `[j, u]` pairs meaning `j / p^u`, dlog
//! sets are sorted 1-based index lists, matrices are row-major.

use std::collections::BTreeMap;

use num::{BigInt, One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use super::CliError;
use crate::coeff::PadicRational;
use crate::context::Context;
use crate::form::{mask_from_indices, mask_indices, Basis, Form};
use crate::matrix::FormMatrix;
use crate::weight::Weight;

pub const VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Form(Form),
    Forms(Vec<Form>),
    Matrix(FormMatrix),
    Matrices(Vec<FormMatrix>),
    Report(Report),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Form(_) => "form",
            Payload::Forms(_) => "forms",
            Payload::Matrix(_) => "matrix",
            Payload::Matrices(_) => "matrices",
            Payload::Report(_) => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub ctx: Context,
    pub payload: Payload,
}

/// Outcome of one checked property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Property {
    pub name: String,
    pub pass: bool,
    pub cases: u64,
    pub detail: Option<String>,
    /// Input that reproduces a failure.
    pub counterexample: Option<Box<Document>>,
}

impl Property {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Property { name: name.into(), pass, cases: 1, detail: None, counterexample: None }
    }
}

/// Result of running a command.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub command: String,
    /// SHA-256 of the canonical input, or of the argument line without input.
    pub digest: String,
    pub outputs: Vec<(String, Payload)>,
    /// Scalar results: valuations, ζ values, booleans.
    pub values: BTreeMap<String, Value>,
    pub properties: Vec<Property>,
    pub iterations: Option<u64>,
    /// Smallest truncation level to which the outputs are known.
    pub precision: u32,
    pub seed: Option<u64>,
    pub wall_ms: Option<u64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.pass)
    }
}

// ---------------------------------------------------------------- serialize

fn big_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn coeff_value(c: &crate::coeff::Coeff, p: u64) -> Value {
    let r = PadicRational::from_coeff(c, p);
    if r.den.is_one() {
        json!([big_value(&r.num), r.pexp])
    } else {
        json!([big_value(&r.num), r.pexp, big_value(&r.den)])
    }
}

pub fn form_value(f: &Form) -> Value {
    let p = f.ctx().p();
    let terms: Vec<Value> = f
        .terms()
        .map(|(b, c)| {
            let k: Vec<Value> = b.weight.coords().iter().map(|w| json!([w.j, w.u])).collect();
            let dlog: Vec<usize> = mask_indices(b.dlog).into_iter().map(|i| i + 1).collect();
            json!({"c": coeff_value(c, p), "k": k, "I": dlog})
        })
        .collect();
    Value::Array(terms)
}

pub fn matrix_value(m: &FormMatrix) -> Value {
    Value::Array(m.row_vecs().iter().map(|row| Value::Array(row.iter().map(form_value).collect())).collect())
}

fn payload_entry(payload: &Payload) -> (&'static str, Value) {
    let v = match payload {
        Payload::Form(f) => form_value(f),
        Payload::Forms(fs) => Value::Array(fs.iter().map(form_value).collect()),
        Payload::Matrix(m) => matrix_value(m),
        Payload::Matrices(ms) => Value::Array(ms.iter().map(matrix_value).collect()),
        Payload::Report(r) => report_value(r),
    };
    (payload.kind(), v)
}

fn report_value(r: &Report) -> Value {
    let mut obj = Map::new();
    obj.insert("command".into(), json!(r.command));
    obj.insert("digest".into(), json!(r.digest));
    let outputs: Vec<Value> = r
        .outputs
        .iter()
        .map(|(name, payload)| {
            let (kind, v) = payload_entry(payload);
            json!({"name": name, kind: v})
        })
        .collect();
    obj.insert("outputs".into(), Value::Array(outputs));
    obj.insert("values".into(), Value::Object(r.values.clone().into_iter().collect()));
    let props: Vec<Value> = r
        .properties
        .iter()
        .map(|p| {
            let mut o = Map::new();
            o.insert("name".into(), json!(p.name));
            o.insert("pass".into(), json!(p.pass));
            o.insert("cases".into(), json!(p.cases));
            if let Some(d) = &p.detail {
                o.insert("detail".into(), json!(d));
            }
            if let Some(doc) = &p.counterexample {
                o.insert("counterexample".into(), doc.to_value());
            }
            Value::Object(o)
        })
        .collect();
    obj.insert("properties".into(), Value::Array(props));
    if let Some(i) = r.iterations {
        obj.insert("iterations".into(), json!(i));
    }
    obj.insert("precision".into(), json!(r.precision));
    if let Some(s) = r.seed {
        obj.insert("seed".into(), json!(s));
    }
    if let Some(w) = r.wall_ms {
        obj.insert("wall_ms".into(), json!(w));
    }
    Value::Object(obj)
}

impl Document {
    pub fn new(ctx: Context, payload: Payload) -> Self {
        Document { ctx, payload }
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("v".into(), json!(VERSION));
        obj.insert("p".into(), json!(self.ctx.p()));
        obj.insert("n".into(), json!(self.ctx.n()));
        obj.insert("m".into(), json!(self.ctx.m()));
        obj.insert("umax".into(), json!(self.ctx.u_max()));
        if let Some(d) = self.ctx.d_max() {
            obj.insert("dmax".into(), json!(d));
        }
        let (kind, v) = payload_entry(&self.payload);
        obj.insert(kind.into(), v);
        Value::Object(obj)
    }

    /// Canonical text: one line of JSON with sorted keys.
    pub fn to_text(&self) -> String {
        self.to_value().to_string()
    }

    pub fn parse(text: &str) -> Result<Document, CliError> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })?;
        Document::from_value(&value, "$")
    }

    pub fn from_value(value: &Value, path: &str) -> Result<Document, CliError> {
        let obj = value.as_object().ok_or_else(|| semantic(path, "document must be an object"))?;
        let version = get_u64(obj, "v", path)?;
        if version != VERSION {
            return Err(semantic(&format!("{path}.v"), format!("unsupported version {version}")));
        }
        let p = get_u64(obj, "p", path)?;
        let n = get_u64(obj, "n", path)? as usize;
        let m = u32::try_from(get_u64(obj, "m", path)?).map_err(|_| semantic(&format!("{path}.m"), "m too large"))?;
        let u_max = match obj.get("umax") {
            Some(_) => u32::try_from(get_u64(obj, "umax", path)?)
                .map_err(|_| semantic(&format!("{path}.umax"), "umax too large"))?,
            None => m + 2,
        };
        let d_max = match obj.get("dmax") {
            Some(_) => Some(get_u64(obj, "dmax", path)?),
            None => None,
        };
        let ctx = Context::with_caps(p, n, m, u_max, d_max).map_err(|e| semantic(path, e.to_string()))?;
        let kinds = ["form", "forms", "matrix", "matrices", "report"];
        let present: Vec<&str> = kinds.iter().copied().filter(|k| obj.contains_key(*k)).collect();
        if present.len() != 1 {
            return Err(semantic(path, format!("expected exactly one payload among {kinds:?}, found {present:?}")));
        }
        let allowed = ["v", "p", "n", "m", "umax", "dmax"];
        if let Some(extra) = obj.keys().find(|k| !allowed.contains(&k.as_str()) && !kinds.contains(&k.as_str())) {
            return Err(semantic(path, format!("unknown field {extra:?}")));
        }
        let kind = present[0];
        let payload = parse_payload(&ctx, kind, &obj[kind], &format!("{path}.{kind}"))?;
        Ok(Document { ctx, payload })
    }
}

// -------------------------------------------------------------------- parse

fn semantic(path: &str, message: impl Into<String>) -> CliError {
    CliError::Semantic { path: path.to_string(), message: message.into() }
}

fn get_u64(obj: &Map<String, Value>, key: &str, path: &str) -> Result<u64, CliError> {
    obj.get(key)
        .ok_or_else(|| semantic(path, format!("missing field {key:?}")))?
        .as_u64()
        .ok_or_else(|| semantic(&format!("{path}.{key}"), "expected a non-negative integer"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| semantic(path, "expected a list"))
}

fn parse_big(v: &Value, path: &str) -> Result<BigInt, CliError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| semantic(path, "expected an integer")),
        Value::String(s) => s.parse().map_err(|_| semantic(path, format!("bad integer {s:?}"))),
        _ => semantic_err(path, "expected an integer or a decimal string"),
    }
}

fn semantic_err<T>(path: &str, message: &str) -> Result<T, CliError> {
    Err(semantic(path, message))
}

fn parse_coeff(v: &Value, p: u64, path: &str) -> Result<crate::coeff::Coeff, CliError> {
    let items = as_array(v, path)?;
    if items.len() != 2 && items.len() != 3 {
        return semantic_err(path, "coefficient must be [num, pexp] or [num, pexp, den]");
    }
    let num = parse_big(&items[0], &format!("{path}[0]"))?;
    let pexp = items[1]
        .as_u64()
        .and_then(|e| u32::try_from(e).ok())
        .ok_or_else(|| semantic(&format!("{path}[1]"), "expected a small non-negative exponent"))?;
    let den = match items.get(2) {
        Some(d) => parse_big(d, &format!("{path}[2]"))?,
        None => BigInt::one(),
    };
    PadicRational { num, pexp, den }.to_coeff(p).map_err(|e| semantic(path, e.to_string()))
}

fn parse_form(ctx: &Context, v: &Value, path: &str) -> Result<Form, CliError> {
    let p = ctx.p();
    let mut terms = Vec::new();
    for (t, term) in as_array(v, path)?.iter().enumerate() {
        let tp = format!("{path}[{t}]");
        let obj = term.as_object().ok_or_else(|| semantic(&tp, "term must be an object"))?;
        if let Some(extra) = obj.keys().find(|k| !["c", "k", "I"].contains(&k.as_str())) {
            return Err(semantic(&tp, format!("unknown field {extra:?}")));
        }
        let c = parse_coeff(obj.get("c").ok_or_else(|| semantic(&tp, "missing \"c\""))?, p, &format!("{tp}.c"))?;
        let kp = format!("{tp}.k");
        let k = as_array(obj.get("k").ok_or_else(|| semantic(&tp, "missing \"k\""))?, &kp)?;
        if k.len() != ctx.n() {
            return Err(semantic(&kp, format!("weight has {} coordinates, n = {}", k.len(), ctx.n())));
        }
        let mut pairs = Vec::with_capacity(k.len());
        for (i, pair) in k.iter().enumerate() {
            let pp = format!("{kp}[{i}]");
            let items = as_array(pair, &pp)?;
            let j = items.first().and_then(Value::as_u64);
            let u = items.get(1).and_then(Value::as_u64).and_then(|u| u32::try_from(u).ok());
            match (j, u, items.len()) {
                (Some(j), Some(u), 2) => pairs.push((j, u)),
                _ => return semantic_err(&pp, "weight coordinate must be [j, u]"),
            }
        }
        let weight = Weight::from_canonical_pairs(&pairs, p).map_err(|e| semantic(&kp, e.to_string()))?;
        let ip = format!("{tp}.I");
        let dlog = as_array(obj.get("I").ok_or_else(|| semantic(&tp, "missing \"I\""))?, &ip)?;
        let mut idx = Vec::with_capacity(dlog.len());
        for (a, i) in dlog.iter().enumerate() {
            let i = i.as_u64().ok_or_else(|| semantic(&format!("{ip}[{a}]"), "expected an index"))? as usize;
            if i == 0 || i > ctx.n() {
                return semantic_err(&format!("{ip}[{a}]"), "dlog index out of range 1..=n");
            }
            if idx.last().is_some_and(|&last| last >= i - 1) {
                return semantic_err(&ip, "dlog indices must be strictly increasing");
            }
            idx.push(i - 1);
        }
        terms.push((Basis { weight, dlog: mask_from_indices(&idx) }, c));
    }
    Form::from_terms(ctx, terms.into_iter().filter(|(_, c)| !c.is_zero())).map_err(|e| semantic(path, e.to_string()))
}

fn parse_matrix(ctx: &Context, v: &Value, path: &str) -> Result<FormMatrix, CliError> {
    let rows = as_array(v, path)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let entries = as_array(row, &rp)?;
        out.push(
            entries
                .iter()
                .enumerate()
                .map(|(j, e)| parse_form(ctx, e, &format!("{rp}[{j}]")))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    FormMatrix::from_rows(ctx, out).map_err(|e| semantic(path, e.to_string()))
}

fn parse_payload(ctx: &Context, kind: &str, v: &Value, path: &str) -> Result<Payload, CliError> {
    Ok(match kind {
        "form" => Payload::Form(parse_form(ctx, v, path)?),
        "forms" => Payload::Forms(
            as_array(v, path)?
                .iter()
                .enumerate()
                .map(|(i, f)| parse_form(ctx, f, &format!("{path}[{i}]")))
                .collect::<Result<_, _>>()?,
        ),
        "matrix" => Payload::Matrix(parse_matrix(ctx, v, path)?),
        "matrices" => Payload::Matrices(
            as_array(v, path)?
                .iter()
                .enumerate()
                .map(|(i, m)| parse_matrix(ctx, m, &format!("{path}[{i}]")))
                .collect::<Result<_, _>>()?,
        ),
        _ => Payload::Report(parse_report(ctx, v, path)?),
    })
}

fn parse_report(ctx: &Context, v: &Value, path: &str) -> Result<Report, CliError> {
    let obj = v.as_object().ok_or_else(|| semantic(path, "report must be an object"))?;
    let string = |key: &str| -> Result<String, CliError> {
        obj.get(key)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| semantic(path, format!("missing string field {key:?}")))
    };
    let opt_u64 = |key: &str| obj.get(key).and_then(Value::as_u64);
    let mut outputs = Vec::new();
    for (i, o) in as_array(obj.get("outputs").unwrap_or(&Value::Array(vec![])), path)?.iter().enumerate() {
        let op = format!("{path}.outputs[{i}]");
        let oo = o.as_object().ok_or_else(|| semantic(&op, "output must be an object"))?;
        let name = oo.get("name").and_then(Value::as_str).ok_or_else(|| semantic(&op, "missing name"))?;
        let (kind, pv) = oo
            .iter()
            .find(|(k, _)| k.as_str() != "name")
            .ok_or_else(|| semantic(&op, "missing payload"))?;
        if kind == "report" {
            return semantic_err(&op, "nested reports are not allowed");
        }
        outputs.push((name.to_string(), parse_payload(ctx, kind, pv, &format!("{op}.{kind}"))?));
    }
    let values = match obj.get("values") {
        Some(Value::Object(m)) => m.clone().into_iter().collect(),
        Some(_) => return semantic_err(path, "values must be an object"),
        None => BTreeMap::new(),
    };
    let mut properties = Vec::new();
    for (i, pv) in as_array(obj.get("properties").unwrap_or(&Value::Array(vec![])), path)?.iter().enumerate() {
        let pp = format!("{path}.properties[{i}]");
        let po = pv.as_object().ok_or_else(|| semantic(&pp, "property must be an object"))?;
        let counterexample = match po.get("counterexample") {
            Some(doc) => Some(Box::new(Document::from_value(doc, &format!("{pp}.counterexample"))?)),
            None => None,
        };
        properties.push(Property {
            name: po.get("name").and_then(Value::as_str).unwrap_or_default().to_string(),
            pass: po.get("pass").and_then(Value::as_bool).ok_or_else(|| semantic(&pp, "missing pass"))?,
            cases: po.get("cases").and_then(Value::as_u64).unwrap_or(1),
            detail: po.get("detail").and_then(Value::as_str).map(str::to_string),
            counterexample,
        });
    }
    Ok(Report {
        command: string("command")?,
        digest: string("digest")?,
        outputs,
        values,
        properties,
        iterations: opt_u64("iterations"),
        precision: opt_u64("precision").unwrap_or(u64::from(ctx.m())) as u32,
        seed: opt_u64("seed"),
        wall_ms: opt_u64("wall_ms"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{"v":1,"p":3,"n":1,"m":3,"form":[{"c":[3,0],"k":[[1,1]],"I":[]}]}"#;

    #[test]
    fn parses_the_example() {
        let doc = Document::parse(EXAMPLE).unwrap();
        let Payload::Form(f) = &doc.payload else { panic!("not a form") };
        let expected = Form::monomial(&doc.ctx, crate::coeff::int(3), Weight::from_pairs(&[(1, 1)], 3), &[]).unwrap();
        assert_eq!(f, &expected);
        assert_eq!(doc.ctx.u_max(), 5);
    }

    #[test]
    fn round_trip() {
        let doc = Document::parse(EXAMPLE).unwrap();
        let text = doc.to_text();
        assert_eq!(text, r#"{"form":[{"I":[],"c":[3,0],"k":[[1,1]]}],"m":3,"n":1,"p":3,"umax":5,"v":1}"#);
        assert_eq!(Document::parse(&text).unwrap(), doc);
    }

    #[test]
    fn empty_form_is_zero() {
        let doc = Document::parse(r#"{"v":1,"p":2,"n":2,"m":2,"form":[]}"#).unwrap();
        assert_eq!(doc.payload, Payload::Form(Form::zero(&doc.ctx)));
    }

    #[test]
    fn rejects_non_canonical_weight() {
        let err = Document::parse(r#"{"v":1,"p":3,"n":1,"m":3,"form":[{"c":[1,0],"k":[[3,1]],"I":[]}]}"#).unwrap_err();
        assert!(matches!(err, CliError::Semantic { ref path, .. } if path == "$.form[0].k"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = Document::parse("{\"v\":1,\n\"p\":}").unwrap_err();
        assert!(matches!(err, CliError::Syntax { line: 2, .. }), "{err}");
    }

    #[test]
    fn coefficients_canonicalize() {
        let doc = Document::parse(r#"{"v":1,"p":3,"n":1,"m":3,"form":[{"c":[9,1],"k":[[1,0]],"I":[1]},{"c":["1",1,2],"k":[[2,0]],"I":[]}]}"#).unwrap();
        assert_eq!(
            doc.to_text(),
            r#"{"form":[{"I":[1],"c":[3,0],"k":[[1,0]]},{"I":[],"c":[1,1,2],"k":[[2,0]]}],"m":3,"n":1,"p":3,"umax":5,"v":1}"#
        );
    }

    #[test]
    fn large_numerators_are_strings() {
        let ctx = Context::new(2, 1, 2).unwrap();
        let big: BigInt = BigInt::from(1u8) << 70usize;
        let f = Form::constant(&ctx, crate::coeff::from_big(big.clone()));
        let text = Document::new(ctx, Payload::Form(f.clone())).to_text();
        assert!(text.contains(&format!("\"{big}\"")));
        assert_eq!(Document::parse(&text).unwrap().payload, Payload::Form(f));
    }
}
