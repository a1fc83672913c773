//! Ready-made functions used by tests, benchmarks and documentation.

use serde_json::json;

use crate::json::{function_from_json, EnvelopeDecl};
use crate::piecewise::{Domain, HFunction, PieceExpr, Side};
use crate::scalar::{Mode, Scalar};

fn build(v: serde_json::Value, mode: Mode) -> HFunction {
    function_from_json(&v, mode).expect("catalog functions are well formed")
}

fn step(below: i64, at: [i64; 2], above: i64) -> HFunction {
    build(
        json!({
            "domain": ["-inf", "inf"],
            "pieces": [
                {"on": ["-inf", 0], "lower": below.to_string()},
                {"on": [0, "inf"], "lower": above.to_string()}
            ],
            "points": [{"x": 0, "value": at}]
        }),
        Mode::Rational,
    )
}

/// `0` for `x < 0`, `[0, 1]` at `0`, `1` for `x > 0`.
pub fn step_up() -> HFunction {
    step(0, [0, 1], 1)
}

/// `0` for `x < 0`, `[-1, 0]` at `0`, `-1` for `x > 0`.
pub fn step_down() -> HFunction {
    step(0, [-1, 0], -1)
}

fn oscillation(expr: &str) -> HFunction {
    let env = json!({"liminf": -1, "limsup": 1});
    build(
        json!({
            "domain": ["-inf", "inf"],
            "pieces": [
                {"on": ["-inf", 0], "lower": expr, "envelopes": {"right": env}},
                {"on": [0, "inf"], "lower": expr, "envelopes": {"left": env}}
            ],
            "points": [{"x": 0, "value": [-1, 1]}]
        }),
        Mode::Float,
    )
}

/// `sin(1/x)` off `0`, `[-1, 1]` at `0`.
pub fn sin_recip() -> HFunction {
    oscillation("sin(1/x)")
}

/// `cos(1/x)` off `0`, `[-1, 1]` at `0`.
pub fn cos_recip() -> HFunction {
    oscillation("cos(1/x)")
}

/// The exact envelope of `sin(1/x) + cos(1/x)` at `0`: `[-sqrt(2), sqrt(2)]`.
pub fn oscillation_sum_envelope() -> EnvelopeDecl {
    let r2 = Scalar::Float(std::f64::consts::SQRT_2);
    EnvelopeDecl {
        expr: "f + g".into(),
        at: Scalar::Float(0.0),
        sides: vec![Side::Left, Side::Right],
        liminf: -&r2,
        limsup: r2,
    }
}

pub fn constant(c: i64) -> HFunction {
    HFunction::constant(Domain::real_line(), Scalar::int(c))
}

/// The constant interval function `[lo, hi]` on the real line.
pub fn constant_interval(lo: i64, hi: i64) -> HFunction {
    build(
        json!({"domain": ["-inf", "inf"], "pieces": [{"on": ["-inf", "inf"], "lower": lo.to_string(), "upper": hi.to_string()}]}),
        Mode::Rational,
    )
}

/// A real function on the whole line given by an expression in `x`.
pub fn real_line_fn(expr: &str) -> HFunction {
    let e = crate::piecewise::parse_piece(expr, Mode::Rational).expect("valid expression");
    HFunction::real(Domain::real_line(), e).expect("expression defined on the real line")
}

/// A real function on `(lo, hi)`.
pub fn real_fn(lo: i64, hi: i64, expr: PieceExpr) -> HFunction {
    let d = Domain::open(Scalar::int(lo), Scalar::int(hi)).expect("non-empty domain");
    HFunction::real(d, expr).expect("expression defined on the domain")
}
