//! JSON function-definition format.
//!
//! ```json
//! {
//!   "functions": {
//!     "f": {
//!       "domain": ["-inf", "inf"],
//!       "pieces": [
//!         {"on": ["-inf", 0], "lower": "0"},
//!         {"on": [0, "inf"], "lower": "1"}
//!       ],
//!       "points": [{"x": 0, "value": [0, 1]}]
//!     }
//!   },
//!   "envelopes": [
//!     {"expr": "f + g", "at": 0, "side": "both", "liminf": "-sqrt(2)", "limsup": "sqrt(2)"}
//!   ]
//! }
//! ```
//!
//! A single function object (with a top-level `"domain"`) is also accepted
//! and bound to the name `f`. Scalars may be JSON numbers or strings holding
//! constant expressions. A piece boundary without an explicit point value
//! gets the hull of the two one-sided limits.

use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::piecewise::{
    parse_constant, parse_piece, Domain, EndEnvelope, HFunction, Node, Piece, Provenance, Side,
};
use crate::scalar::{Mode, Scalar};

/// A user-declared envelope for the piece ends of a computed expression.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeDecl {
    /// Canonical text of the expression the declaration applies to.
    pub expr: String,
    pub at: Scalar,
    pub sides: Vec<Side>,
    pub liminf: Scalar,
    pub limsup: Scalar,
}

/// Named functions plus envelope declarations, in file order.
#[derive(Clone, Debug, Default)]
pub struct FunctionFile {
    pub functions: Vec<(String, HFunction)>,
    pub envelopes: Vec<EnvelopeDecl>,
}

impl FunctionFile {
    pub fn get(&self, name: &str) -> Result<&HFunction> {
        self.functions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Unbound(name.to_string()))
    }
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn parse_file(text: &str, mode: Mode) -> Result<FunctionFile> {
    let v: Value = serde_json::from_str(text).map_err(|e| format_err(format!("invalid JSON: {e}")))?;
    file_from_json(&v, mode)
}

pub fn file_from_json(v: &Value, mode: Mode) -> Result<FunctionFile> {
    let obj = v.as_object().ok_or_else(|| format_err("top level must be an object"))?;
    let mut out = FunctionFile::default();
    if obj.contains_key("domain") {
        out.functions.push(("f".to_string(), function_from_json(v, mode)?));
        return Ok(out);
    }
    let funcs = obj
        .get("functions")
        .and_then(Value::as_object)
        .ok_or_else(|| format_err("missing \"functions\" object"))?;
    for (name, def) in funcs {
        let f = function_from_json(def, mode).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("function `{name}`: {m}")),
            other => other,
        })?;
        out.functions.push((name.clone(), f));
    }
    if let Some(envs) = obj.get("envelopes") {
        let envs = envs.as_array().ok_or_else(|| format_err("\"envelopes\" must be an array"))?;
        for e in envs {
            out.envelopes.push(envelope_decl(e, mode)?);
        }
    }
    Ok(out)
}

fn envelope_decl(v: &Value, mode: Mode) -> Result<EnvelopeDecl> {
    let expr = v
        .get("expr")
        .and_then(Value::as_str)
        .ok_or_else(|| format_err("envelope declaration needs \"expr\""))?;
    let sides = match v.get("side").and_then(Value::as_str).unwrap_or("both") {
        "left" => vec![Side::Left],
        "right" => vec![Side::Right],
        "both" => vec![Side::Left, Side::Right],
        other => return Err(format_err(format!("unknown side `{other}`"))),
    };
    Ok(EnvelopeDecl {
        expr: crate::algebra::ExprTree::parse(expr)?.to_string(),
        at: field_scalar(v, "at", mode)?,
        sides,
        liminf: field_scalar(v, "liminf", mode)?,
        limsup: field_scalar(v, "limsup", mode)?,
    })
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| format_err(format!("missing \"{key}\"")))
}

fn field_scalar(v: &Value, key: &str, mode: Mode) -> Result<Scalar> {
    scalar_from_json(field(v, key)?, mode)
}

pub fn scalar_from_json(v: &Value, mode: Mode) -> Result<Scalar> {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            Scalar::parse(&text, mode).ok_or_else(|| format_err(format!("bad number {text}")))
        }
        Value::String(s) => parse_constant(s, mode),
        other => Err(format_err(format!("expected a number, got {other}"))),
    }
}

fn bound_from_json(v: &Value, mode: Mode, infinite: &str) -> Result<Option<Scalar>> {
    match v.as_str() {
        Some(s) if s.trim() == infinite => Ok(None),
        Some(s) if s.trim() == "+inf" && infinite == "inf" => Ok(None),
        _ => scalar_from_json(v, mode).map(Some),
    }
}

fn pair(v: &Value, what: &str) -> Result<(Value, Value)> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((a.clone(), b.clone())),
        _ => Err(format_err(format!("{what} must be a two-element array"))),
    }
}

fn interval_from_json(v: &Value, mode: Mode) -> Result<Interval> {
    if v.is_array() {
        let (a, b) = pair(v, "interval")?;
        Interval::new(scalar_from_json(&a, mode)?, scalar_from_json(&b, mode)?)
    } else {
        Ok(Interval::point(scalar_from_json(v, mode)?))
    }
}

fn end_envelope(v: &Value, mode: Mode) -> Result<EndEnvelope> {
    let provenance = match v.get("provenance").and_then(Value::as_str) {
        None | Some("declared") => Provenance::Declared,
        Some("estimated") => Provenance::Estimated,
        Some("enclosed") => Provenance::Enclosed,
        Some("evaluated") => Provenance::Evaluated,
        Some(other) => return Err(format_err(format!("unknown provenance `{other}`"))),
    };
    Ok(EndEnvelope {
        liminf: field_scalar(v, "liminf", mode)?,
        limsup: field_scalar(v, "limsup", mode)?,
        provenance,
    })
}

pub fn function_from_json(v: &Value, mode: Mode) -> Result<HFunction> {
    let (lo, hi) = pair(field(v, "domain")?, "\"domain\"")?;
    let domain = Domain::new(bound_from_json(&lo, mode, "-inf")?, bound_from_json(&hi, mode, "inf")?)?;
    let pieces_json = field(v, "pieces")?
        .as_array()
        .ok_or_else(|| format_err("\"pieces\" must be an array"))?;
    if pieces_json.is_empty() {
        return Err(format_err("at least one piece is required"));
    }
    let mut boundaries = Vec::new();
    let mut pieces = Vec::new();
    let mut prev_end: Option<Option<Scalar>> = None;
    for (i, p) in pieces_json.iter().enumerate() {
        let (a, b) = pair(field(p, "on")?, "\"on\"")?;
        let a = bound_from_json(&a, mode, "-inf")?;
        let b = bound_from_json(&b, mode, "inf")?;
        match &prev_end {
            None if a.as_ref() != domain.lo() => {
                return Err(format_err("first piece must start at the domain's lower end"))
            }
            Some(end) if *end != a => return Err(format_err(format!("piece {i} does not start where piece {} ends", i - 1))),
            Some(_) => boundaries.push(a.clone().ok_or_else(|| format_err("infinite interior boundary"))?),
            None => {}
        }
        let lower = parse_piece(field(p, "lower")?.as_str().ok_or_else(|| format_err("\"lower\" must be a string"))?, mode)?;
        let upper = match p.get("upper") {
            Some(u) => parse_piece(u.as_str().ok_or_else(|| format_err("\"upper\" must be a string"))?, mode)?,
            None => lower.clone(),
        };
        let envs = p.get("envelopes");
        let env = |key: &str| -> Result<Option<EndEnvelope>> {
            envs.and_then(|e| e.get(key)).map(|e| end_envelope(e, mode)).transpose()
        };
        pieces.push(Piece { lower, upper, left: env("left")?, right: env("right")? });
        prev_end = Some(b);
    }
    if prev_end.as_ref().map(|e| e.as_ref()) != Some(domain.hi()) {
        return Err(format_err("last piece must end at the domain's upper end"));
    }
    let nodes = boundaries
        .iter()
        .map(|x| Node { x: x.clone(), value: Interval::point(Scalar::zero()) })
        .collect();
    let mut f = HFunction::from_parts(domain, nodes, pieces)?;
    for k in 0..boundaries.len() {
        let v = f.punctured_completion(k);
        f.set_node_value(k, v);
    }
    if let Some(points) = v.get("points") {
        let points = points.as_array().ok_or_else(|| format_err("\"points\" must be an array"))?;
        for p in points {
            let x = field_scalar(p, "x", mode)?;
            let value = interval_from_json(field(p, "value")?, mode)?;
            f = f.with_value_at(&x, value)?;
        }
    }
    Ok(f)
}

/// Decimal values become JSON numbers, other exact values `"p/q"` strings.
pub fn scalar_to_json(s: &Scalar) -> Value {
    if s.is_decimal() {
        if let Ok(n) = Number::from_str(&s.to_text()) {
            return Value::Number(n);
        }
    }
    Value::String(s.to_text())
}

pub fn interval_to_json(v: &Interval) -> Value {
    json!([scalar_to_json(v.lo()), scalar_to_json(v.hi())])
}

fn bound_to_json(b: Option<&Scalar>, infinite: &str) -> Value {
    b.map_or_else(|| Value::String(infinite.to_string()), scalar_to_json)
}

fn envelope_to_json(e: &EndEnvelope) -> Value {
    json!({
        "liminf": scalar_to_json(&e.liminf),
        "limsup": scalar_to_json(&e.limsup),
        "provenance": e.provenance.name(),
    })
}

/// Serializes in the input format. Evaluated envelopes are implied by the
/// expressions and omitted.
pub fn function_to_json(f: &HFunction) -> Value {
    let pieces: Vec<Value> = f
        .pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (a, b) = f.piece_bounds(i);
            let mut obj = Map::new();
            obj.insert("on".into(), json!([bound_to_json(a.as_ref(), "-inf"), bound_to_json(b.as_ref(), "inf")]));
            obj.insert("lower".into(), Value::String(p.lower.to_string()));
            if !p.is_real() {
                obj.insert("upper".into(), Value::String(p.upper.to_string()));
            }
            let mut envs = Map::new();
            for (key, env) in [("left", &p.left), ("right", &p.right)] {
                if let Some(e) = env.as_ref().filter(|e| !e.is_evaluated()) {
                    envs.insert(key.into(), envelope_to_json(e));
                }
            }
            if !envs.is_empty() {
                obj.insert("envelopes".into(), Value::Object(envs));
            }
            Value::Object(obj)
        })
        .collect();
    let points: Vec<Value> = f
        .nodes()
        .iter()
        .map(|n| json!({"x": scalar_to_json(&n.x), "value": interval_to_json(&n.value)}))
        .collect();
    json!({
        "domain": [bound_to_json(f.domain().lo(), "-inf"), bound_to_json(f.domain().hi(), "inf")],
        "pieces": pieces,
        "points": points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::piecewise::EqConfig;

    #[test]
    fn step_function_loads() {
        let text = r#"{"domain": ["-inf", "inf"],
            "pieces": [{"on": ["-inf", 0], "lower": "0"}, {"on": [0, "inf"], "lower": "1"}],
            "points": [{"x": 0, "value": [0, 1]}]}"#;
        let file = parse_file(text, Mode::Rational).unwrap();
        let f = file.get("f").unwrap();
        assert_eq!(f.eval_at(&Scalar::zero()).unwrap(), Interval::new(Scalar::zero(), Scalar::one()).unwrap());
        assert_eq!(f.eval_at(&Scalar::int(-3)).unwrap(), Interval::point(Scalar::zero()));
        assert!(matches!(file.get("h"), Err(Error::Unbound(_))));
    }

    #[test]
    fn missing_point_defaults_to_hull_of_limits() {
        let text = r#"{"domain": [-1, 1],
            "pieces": [{"on": [-1, 0.5], "lower": "x"}, {"on": [0.5, 1], "lower": "2"}]}"#;
        let f = &parse_file(text, Mode::Rational).unwrap().functions[0].1;
        let half = Scalar::ratio(1, 2);
        assert_eq!(f.eval_at(&half).unwrap(), Interval::new(half.clone(), Scalar::int(2)).unwrap());
    }

    #[test]
    fn interior_point_splits_a_piece() {
        let text = r#"{"domain": [0, 1], "pieces": [{"on": [0, 1], "lower": "x"}],
            "points": [{"x": "1/3", "value": 5}]}"#;
        let f = &parse_file(text, Mode::Rational).unwrap().functions[0].1;
        assert_eq!(f.eval_at(&Scalar::ratio(1, 3)).unwrap(), Interval::point(Scalar::int(5)));
        assert_eq!(f.nodes().len(), 1);
    }

    #[test]
    fn gaps_and_bad_intervals_are_rejected() {
        let gap = r#"{"domain": [0, 2], "pieces": [{"on": [0, 1], "lower": "x"}, {"on": [1.5, 2], "lower": "x"}]}"#;
        assert!(matches!(parse_file(gap, Mode::Rational), Err(Error::Format(_))));
        let bad = r#"{"domain": [0, 2], "pieces": [{"on": [0, 2], "lower": "x"}], "points": [{"x": 1, "value": [2, 1]}]}"#;
        assert!(matches!(parse_file(bad, Mode::Rational), Err(Error::InvalidInterval { .. })));
        let pole = r#"{"domain": [-1, 1], "pieces": [{"on": [-1, 1], "lower": "1/x"}]}"#;
        assert!(matches!(parse_file(pole, Mode::Float), Err(Error::InvalidFunction(_))));
    }

    #[test]
    fn scalars_print_exactly() {
        assert_eq!(scalar_to_json(&Scalar::ratio(1, 4)).to_string(), "0.25");
        assert_eq!(scalar_to_json(&Scalar::ratio(1, 3)).to_string(), "\"1/3\"");
        assert_eq!(scalar_to_json(&Scalar::int(-7)).to_string(), "-7");
    }

    #[test]
    fn round_trip() {
        for f in [catalog::step_up(), catalog::sin_recip(), catalog::constant_interval(0, 1)] {
            let v = function_to_json(&f);
            let mode = if f.pieces()[0].lower.as_poly().is_some() { Mode::Rational } else { Mode::Float };
            let back = function_from_json(&v, mode).unwrap();
            assert!(back.equals(&f, &EqConfig::default()), "{v}");
            assert_eq!(function_to_json(&back), v);
        }
    }
}
