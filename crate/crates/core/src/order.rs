//! Pointwise interval order, monotone continuous approximation and order
//! limits of function sequences.
//!
//! Order limits are taken structurally. Elements at depths `N/2` and `N` must
//! share their breakpoint count; pieces that shrink geometrically between the
//! two depths collapse into a single node (a jump of the limit). The other
//! pieces and the node values are extrapolated as `2 a_N - a_{N/2}`, which is
//! exact for quantities that move like `1/N` and the identity for stable ones.
//! The result is completed to an H-continuous function and reported with its
//! residual.

use std::sync::Arc;

use crate::algebra::{additive_inverse, ring_op, Definition, Op, OpReport};
use crate::baire::{fis, fsi};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::piecewise::{
    align, is_h_continuous, pointwise_add, pointwise_mul, random_points_in, EqConfig, HFunction, Node, Piece,
    PieceExpr, Poly,
};
use crate::scalar::{Mode, Scalar, FLOAT_TOL};

/// Random sample points per piece for non-linear order comparisons.
const LEQ_SAMPLES: usize = 128;
/// Length ratio between depths `N` and `N/2` below which a piece collapses.
const COLLAPSE_RATIO: f64 = 0.75;

/// `f <= g` in the pointwise interval order: both endpoint functions
/// compared. Exact on linear pieces, sampled otherwise.
pub fn func_leq(f: &HFunction, g: &HFunction) -> Result<bool> {
    let (f, g) = align(f, g)?;
    for (a, b) in f.nodes().iter().zip(g.nodes()) {
        if !a.value.leq(&b.value) {
            return Ok(false);
        }
    }
    for i in 0..f.pieces().len() {
        let (p, q) = (&f.pieces()[i], &g.pieces()[i]);
        let bounds = f.piece_bounds(i);
        for (a, b) in [(&p.lower, &q.lower), (&p.upper, &q.upper)] {
            if !expr_leq(a, b, &bounds)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn expr_leq(a: &PieceExpr, b: &PieceExpr, bounds: &(Option<Scalar>, Option<Scalar>)) -> Result<bool> {
    if let (Some((ca, sa)), Some((cb, sb))) = (a.as_linear(), b.as_linear()) {
        // d = a - b must be <= 0 on the open piece.
        let (c, s) = (&ca - &cb, &sa - &sb);
        let at = |x: &Scalar| &c + &(&s * x);
        let zero = Scalar::zero();
        let ok_lo = match &bounds.0 {
            Some(x) => at(x).approx_le(&zero, 0.0),
            None => s >= zero,
        };
        let ok_hi = match &bounds.1 {
            Some(x) => at(x).approx_le(&zero, 0.0),
            None => s <= zero,
        };
        let ok_const = bounds.0.is_some() || bounds.1.is_some() || c <= zero;
        return Ok(ok_lo && ok_hi && ok_const);
    }
    let (lo, hi) = match bounds {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        (Some(a), None) => (a.clone(), a + &Scalar::int(10)),
        (None, Some(b)) => (b - &Scalar::int(10), b.clone()),
        (None, None) => (Scalar::int(-10), Scalar::int(10)),
    };
    for x in random_points_in(&lo, &hi, LEQ_SAMPLES, 0x1e9, Mode::Float) {
        match (a.eval(&x), b.eval(&x)) {
            (Some(u), Some(v)) if u.approx_le(&v, FLOAT_TOL) => {}
            (Some(_), Some(_)) => return Ok(false),
            _ => return Err(Error::Eval(format!("cannot compare pieces at {x}"))),
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    FromBelow,
    FromAbove,
}

/// A partial linear function on a closed support, or a cone `v + n|x - p|`.
enum Candidate {
    Line { lo: Option<Scalar>, hi: Option<Scalar>, c: Scalar, s: Scalar },
    Cone { p: Scalar, v: Scalar },
}

impl Candidate {
    /// `(intercept, slope)` on the open interval `(u, w)`, if it applies there.
    fn line_on(&self, u: Option<&Scalar>, w: Option<&Scalar>, n: &Scalar) -> Option<(Scalar, Scalar)> {
        match self {
            Candidate::Line { lo, hi, c, s } => {
                let starts = match (lo, u) {
                    (None, _) => true,
                    (Some(a), Some(u)) => a <= u,
                    (Some(_), None) => false,
                };
                let ends = match (hi, w) {
                    (None, _) => true,
                    (Some(b), Some(w)) => w <= b,
                    (Some(_), None) => false,
                };
                (starts && ends).then(|| (c.clone(), s.clone()))
            }
            Candidate::Cone { p, v } => {
                if w.is_some_and(|w| w <= p) {
                    Some((v + &(n * p), -n))
                } else {
                    Some((v - &(n * p), n.clone()))
                }
            }
        }
    }

    fn kinks(&self) -> Vec<Scalar> {
        match self {
            Candidate::Line { lo, hi, .. } => lo.iter().chain(hi.iter()).cloned().collect(),
            Candidate::Cone { p, .. } => vec![p.clone()],
        }
    }
}

/// The slope-`n` inf-convolution `x -> inf_y (lo_f(y) + n|x - y|)` of the
/// lower function (or the dual sup-convolution of the upper function).
/// Exact for piecewise-linear `f`; the result is continuous, real valued
/// and `n`-Lipschitz.
pub fn infconv_approx(f: &HFunction, n: u64, dir: Direction) -> Result<HFunction> {
    if !f.is_piecewise_linear() {
        return Err(Error::NotPiecewiseLinear("inf-convolution needs linear pieces".into()));
    }
    if n == 0 {
        return Err(Error::NonConvergence("slope must be positive".into()));
    }
    match dir {
        Direction::FromBelow => lower_regularization(f, n),
        Direction::FromAbove => Ok(lower_regularization(&f.negate(), n)?.negate()),
    }
}

fn lower_regularization(f: &HFunction, n: u64) -> Result<HFunction> {
    let slope = Scalar::int(n as i64);
    let mut cands = Vec::new();
    for (i, piece) in f.pieces().iter().enumerate() {
        let (c, s) = piece.lower.as_linear().expect("checked linear");
        let (a, b) = f.piece_bounds(i);
        if a.is_none() && s > slope || b.is_none() && s < -&slope {
            return Err(Error::NonConvergence(format!(
                "slope {s} exceeds {n} on an unbounded piece; the regularization is -inf"
            )));
        }
        for end in a.iter().chain(b.iter()) {
            cands.push(Candidate::Cone { p: end.clone(), v: &c + &(&s * end) });
        }
        cands.push(Candidate::Line { lo: a, hi: b, c, s });
    }
    for node in f.nodes() {
        cands.push(Candidate::Cone { p: node.x.clone(), v: node.value.lo().clone() });
    }
    lower_envelope(f, &cands, &slope)
}

fn lower_envelope(f: &HFunction, cands: &[Candidate], n: &Scalar) -> Result<HFunction> {
    let domain = f.domain().clone();
    let mut kinks: Vec<Scalar> = cands.iter().flat_map(Candidate::kinks).filter(|x| domain.contains(x)).collect();
    kinks.sort();
    kinks.dedup();
    let mut ends: Vec<Option<Scalar>> = vec![domain.lo().cloned()];
    ends.extend(kinks.into_iter().map(Some));
    ends.push(domain.hi().cloned());

    // (right end of segment, line) in increasing order.
    let mut segments: Vec<(Option<Scalar>, (Scalar, Scalar))> = Vec::new();
    for w in ends.windows(2) {
        let (u, v) = (w[0].as_ref(), w[1].as_ref());
        let lines: Vec<(Scalar, Scalar)> = cands.iter().filter_map(|c| c.line_on(u, v, n)).collect();
        let mut cuts: Vec<Scalar> = Vec::new();
        for (i, (c1, s1)) in lines.iter().enumerate() {
            for (c2, s2) in &lines[i + 1..] {
                if s1 == s2 {
                    continue;
                }
                if let Some(x) = (c2 - c1).checked_div(&(s1 - s2)) {
                    if u.is_none_or(|u| *u < x) && v.is_none_or(|v| x < *v) {
                        cuts.push(x);
                    }
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut bounds: Vec<Option<Scalar>> = vec![u.cloned()];
        bounds.extend(cuts.into_iter().map(Some));
        bounds.push(v.cloned());
        for b in bounds.windows(2) {
            let probe = match (&b[0], &b[1]) {
                (Some(a), Some(c)) => (a + c).checked_div(&Scalar::int(2)).expect("nonzero"),
                (Some(a), None) => a + &Scalar::one(),
                (None, Some(c)) => c - &Scalar::one(),
                (None, None) => Scalar::zero(),
            };
            let best = lines
                .iter()
                .min_by(|(c1, s1), (c2, s2)| (c1 + &(s1 * &probe)).cmp(&(c2 + &(s2 * &probe))))
                .ok_or_else(|| Error::InternalConsistency("no candidate covers a segment".into()))?;
            segments.push((b[1].clone(), best.clone()));
        }
    }
    let mut nodes = Vec::new();
    let mut pieces = Vec::new();
    for (k, (end, (c, s))) in segments.iter().enumerate() {
        pieces.push(Piece::real(PieceExpr::from_poly(&Poly::linear(c.clone(), s.clone()))));
        if k + 1 < segments.len() {
            let x = end.clone().expect("interior segment ends are finite");
            let v = c + &(s * &x);
            nodes.push(Node { x, value: Interval::point(v) });
        }
    }
    Ok(HFunction::from_trusted_parts(domain, nodes, pieces)?.normalize())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Unordered,
}

type Generator = dyn Fn(u64) -> Result<HFunction> + Send + Sync;

/// A sequence `f_1, f_2, ...` given by a generator.
#[derive(Clone)]
pub struct FunctionSequence {
    generator: Arc<Generator>,
    pub tag: Monotonicity,
}

impl std::fmt::Debug for FunctionSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FunctionSequence({:?})", self.tag)
    }
}

impl FunctionSequence {
    pub fn new(tag: Monotonicity, generator: impl Fn(u64) -> Result<HFunction> + Send + Sync + 'static) -> Self {
        FunctionSequence { generator: Arc::new(generator), tag }
    }

    /// The `n`-th element, `n >= 1`.
    pub fn element(&self, n: u64) -> Result<HFunction> {
        (self.generator)(n.max(1))
    }

    pub fn constant(f: HFunction) -> Self {
        FunctionSequence::new(Monotonicity::Increasing, move |_| Ok(f.clone()))
    }

    /// `n -> infconv_approx(f, scale * n, dir)`.
    pub fn infconv(f: HFunction, dir: Direction, scale: u64) -> Self {
        let tag = match dir {
            Direction::FromBelow => Monotonicity::Increasing,
            Direction::FromAbove => Monotonicity::Decreasing,
        };
        FunctionSequence::new(tag, move |n| infconv_approx(&f, scale * n, dir))
    }

    /// Elementwise pointwise `a_n op b_n`.
    pub fn combine(a: &FunctionSequence, b: &FunctionSequence, op: Op) -> Self {
        let tag = match op {
            Op::Plus if a.tag == b.tag => a.tag,
            _ => Monotonicity::Unordered,
        };
        let (a, b) = (a.clone(), b.clone());
        FunctionSequence::new(tag, move |n| {
            let (x, y) = (a.element(n)?, b.element(n)?);
            let r = match op {
                Op::Plus => pointwise_add(&x, &y)?,
                Op::Times => pointwise_mul(&x, &y)?,
            };
            Ok(r.normalize())
        })
    }
}

/// `f_{2n-1} = a_n`, `f_{2n} = b_n`.
pub fn mixture(a: &FunctionSequence, b: &FunctionSequence) -> FunctionSequence {
    let tag = if a.tag == b.tag && a.tag == Monotonicity::Unordered { a.tag } else { Monotonicity::Unordered };
    let (a, b) = (a.clone(), b.clone());
    FunctionSequence::new(tag, move |m| {
        let k = m.div_ceil(2);
        if m % 2 == 1 {
            a.element(k)
        } else {
            b.element(k)
        }
    })
}

/// An order limit at finite depth, with its evidence.
#[derive(Clone, Debug)]
pub struct OrderLimit {
    pub limit: HFunction,
    pub depth: u64,
    /// Largest Hausdorff distance between the depth-`N` element and the
    /// limit at sample points.
    pub residual: f64,
    /// Whether the depth-`N` element lies on the correct side of the limit
    /// (`α_N <= limit` for increasing, `limit <= β_N` for decreasing). With
    /// the sequence itself as one witness and the constant limit as the other
    /// this is the order-convergence squeeze at the sampled depth.
    pub witness_holds: Option<bool>,
    /// The depth-`N` element.
    pub element: HFunction,
}

fn piece_length(f: &HFunction, i: usize) -> f64 {
    match f.piece_bounds(i) {
        (Some(a), Some(b)) => (&b - &a).to_f64(),
        _ => f64::INFINITY,
    }
}

fn check_monotone(tag: Monotonicity, pairs: &[(u64, &HFunction, u64, &HFunction)]) -> Result<()> {
    for &(m, a, k, b) in pairs {
        let ok = match tag {
            Monotonicity::Increasing => func_leq(a, b)?,
            Monotonicity::Decreasing => func_leq(b, a)?,
            Monotonicity::Unordered => true,
        };
        if !ok {
            return Err(Error::NonMonotone(format!("{tag:?} between elements {m} and {k}")));
        }
    }
    Ok(())
}

/// The order limit of `seq`, computed from its elements at `depth / 2` and
/// `depth`.
pub fn order_limit(seq: &FunctionSequence, depth: u64) -> Result<OrderLimit> {
    if depth < 4 {
        return Err(Error::NonConvergence("depth must be at least 4".into()));
    }
    let depth = depth - depth % 2;
    let half_n = depth / 2;
    let quarter = seq.element(depth / 4)?;
    let half = seq.element(half_n)?.normalize();
    let full = seq.element(depth)?.normalize();
    check_monotone(seq.tag, &[(depth / 4, &quarter, half_n, &half), (half_n, &half, depth, &full)])?;
    let limit = structural_limit(&half, &full)?;
    let limit = match seq.tag {
        Monotonicity::Decreasing => fsi(&limit)?,
        _ => fis(&limit)?,
    };
    let samples = full.sample_points(1000, 0x0de9, Mode::Float);
    let mut residual: f64 = 0.0;
    for x in samples.iter().filter(|x| limit.node_index(x).is_none()) {
        residual = residual.max(full.eval_at(x)?.distance(&limit.eval_at(x)?));
    }
    let witness_holds = match seq.tag {
        Monotonicity::Increasing => Some(func_leq(&full, &limit)?),
        Monotonicity::Decreasing => Some(func_leq(&limit, &full)?),
        Monotonicity::Unordered => None,
    };
    Ok(OrderLimit { limit, depth, residual, witness_holds, element: full })
}

fn structural_limit(half: &HFunction, full: &HFunction) -> Result<HFunction> {
    let m = full.nodes().len();
    if half.nodes().len() != m {
        return Err(Error::NonConvergence(format!(
            "breakpoint count changes from {} to {m} between depths",
            half.nodes().len()
        )));
    }
    let collapsing: Vec<bool> =
        (0..=m).map(|i| piece_length(full, i) < COLLAPSE_RATIO * piece_length(half, i)).collect();
    if collapsing[0] || collapsing[m] {
        return Err(Error::NonConvergence("a boundary piece shrinks".into()));
    }
    let mut nodes: Vec<Node> = Vec::new();
    let mut pieces: Vec<Piece> = vec![extrapolate(&half.pieces()[0], &full.pieces()[0])?];
    let mut k = 0;
    while k < m {
        let mut j = k;
        while collapsing[j + 1] {
            j += 1;
        }
        let stable: Vec<&Scalar> = (k..=j)
            .filter(|&i| full.nodes()[i].x == half.nodes()[i].x)
            .map(|i| &full.nodes()[i].x)
            .collect();
        let x = match stable.as_slice() {
            [x] => (*x).clone(),
            [] => {
                let rich: Vec<Scalar> = (k..=j)
                    .map(|i| &(&Scalar::int(2) * &full.nodes()[i].x) - &half.nodes()[i].x)
                    .collect();
                if rich.iter().any(|r| !r.approx_eq(&rich[0], FLOAT_TOL)) {
                    return Err(Error::NonConvergence(format!(
                        "collapsing breakpoints near {} do not share a limit",
                        full.nodes()[k].x
                    )));
                }
                rich[0].clone()
            }
            _ => {
                return Err(Error::NonConvergence(format!(
                    "several fixed breakpoints collapse together near {}",
                    full.nodes()[k].x
                )))
            }
        };
        if nodes.last().is_some_and(|n: &Node| n.x >= x) || !full.domain().contains(&x) {
            return Err(Error::NonConvergence(format!("limit breakpoints out of order at {x}")));
        }
        let value = extrapolate_value(&half.eval_at(&x)?, &full.eval_at(&x)?);
        nodes.push(Node { x, value });
        pieces.push(extrapolate(&half.pieces()[j + 1], &full.pieces()[j + 1])?);
        k = j + 1;
    }
    let polynomial = pieces.iter().all(|p| p.lower.as_poly().is_some() && p.upper.as_poly().is_some());
    let f = if polynomial {
        HFunction::from_trusted_parts(full.domain().clone(), nodes, pieces)?
    } else {
        HFunction::from_parts(full.domain().clone(), nodes, pieces)?
    };
    Ok(f.normalize())
}

/// Richardson step `2 a_N - a_{N/2}`, exact for errors proportional to `1/N`.
fn richardson(half: &Scalar, full: &Scalar) -> Scalar {
    &(&Scalar::int(2) * full) - half
}

fn extrapolate_value(half: &Interval, full: &Interval) -> Interval {
    Interval::hull_of(richardson(half.lo(), full.lo()), richardson(half.hi(), full.hi()))
}

fn extrapolate_expr(half: &PieceExpr, full: &PieceExpr) -> Result<PieceExpr> {
    match (half.as_poly(), full.as_poly()) {
        (Some(h), Some(f)) => Ok(PieceExpr::from_poly(&f.scale(&Scalar::int(2)).sub(&h))),
        _ if half.same_as(full, FLOAT_TOL) => Ok(full.clone()),
        _ => Err(Error::NonConvergence(format!("piece `{full}` does not stabilize"))),
    }
}

fn extrapolate(half: &Piece, full: &Piece) -> Result<Piece> {
    let lower = extrapolate_expr(&half.lower, &full.lower)?;
    let upper = if full.is_real() && half.is_real() { lower.clone() } else { extrapolate_expr(&half.upper, &full.upper)? };
    Ok(Piece { lower, upper, left: None, right: None })
}

/// Result of a Cauchy check against a supplied witness sequence.
#[derive(Clone, Debug)]
pub struct CauchyReport {
    pub depth: u64,
    pub pairs_checked: usize,
    pub beta_decreasing: bool,
    /// Residual of the order limit of `β` against zero, if it was computed.
    pub beta_limit_zero: bool,
    pub first_violation: Option<String>,
}

impl CauchyReport {
    /// A pass shows the sequence is Cauchy; a failure only shows that this
    /// witness does not work.
    pub fn passed(&self) -> bool {
        self.beta_decreasing && self.beta_limit_zero && self.first_violation.is_none()
    }
}

/// Checks `f_m ⊕ (-f_k) <= β_n` for all `n <= m, k <= depth`, that `β` is
/// decreasing, and that the order limit of `β` is zero.
pub fn verify_cauchy(seq: &FunctionSequence, beta: &FunctionSequence, depth: u64) -> Result<CauchyReport> {
    let fs: Vec<HFunction> = (1..=depth).map(|n| seq.element(n)).collect::<Result<_>>()?;
    let bs: Vec<HFunction> = (1..=depth).map(|n| beta.element(n)).collect::<Result<_>>()?;
    let negs: Vec<HFunction> = fs.iter().map(additive_inverse).collect::<Result<_>>()?;
    let mut pairs = 0;
    let mut first_violation = None;
    'outer: for m in 0..fs.len() {
        for k in 0..fs.len() {
            let diff = ring_op(Op::Plus, Definition::Completion, &fs[m], &negs[k], &[])?.result;
            for n in 0..=m.min(k) {
                pairs += 1;
                if !func_leq(&diff, &bs[n])? {
                    first_violation =
                        Some(format!("f_{} - f_{} is not below beta_{}", m + 1, k + 1, n + 1));
                    break 'outer;
                }
            }
        }
    }
    let mut beta_decreasing = true;
    for w in bs.windows(2) {
        if !func_leq(&w[1], &w[0])? {
            beta_decreasing = false;
        }
    }
    let zero = HFunction::constant(fs[0].domain().clone(), Scalar::zero());
    let beta_limit_zero = match order_limit(beta, (depth + depth % 2).max(4)) {
        Ok(l) => l.limit.equals(&zero, &EqConfig::default()),
        Err(_) => false,
    };
    Ok(CauchyReport { depth, pairs_checked: pairs, beta_decreasing, beta_limit_zero, first_violation })
}

/// `f ⊕ g` or `f ⊗ g` as the order limit of `f_n op g_n`, where `f_n`, `g_n`
/// are the slope-`n` regularizations from below.
pub fn ring_op_def3(op: Op, f: &HFunction, g: &HFunction, depth: u64) -> Result<OpReport> {
    ring_op_def3_with(op, f, g, depth, 1, 1)
}

/// As [`ring_op_def3`], with the approximating slopes scaled by `sf` and `sg`.
pub fn ring_op_def3_with(op: Op, f: &HFunction, g: &HFunction, depth: u64, sf: u64, sg: u64) -> Result<OpReport> {
    for (h, name) in [(f, "left operand"), (g, "right operand")] {
        if !h.is_piecewise_linear() {
            return Err(Error::NotPiecewiseLinear(name.into()));
        }
        if !is_h_continuous(h) {
            return Err(Error::NotHContinuous(name.into()));
        }
    }
    let fs = FunctionSequence::infconv(f.clone(), Direction::FromBelow, sf);
    let gs = FunctionSequence::infconv(g.clone(), Direction::FromBelow, sg);
    let seq = FunctionSequence::combine(&fs, &gs, op);
    def3_from_sequence(&seq, depth)
}

pub(crate) fn def3_from_sequence(seq: &FunctionSequence, depth: u64) -> Result<OpReport> {
    let lim = order_limit(seq, depth)?;
    Ok(OpReport {
        result: lim.limit,
        pointwise: lim.element,
        witnesses: Vec::new(),
        definition: Definition::OrderLimit { depth },
    })
}

/// Largest Hausdorff distance between two functions over their nodes and
/// `count` seeded sample points.
pub fn max_deviation(f: &HFunction, g: &HFunction, count: usize, seed: u64) -> Result<f64> {
    let mut xs = f.domain().random_points(count, seed, Mode::Float);
    xs.extend(f.node_xs());
    xs.extend(g.node_xs());
    let mut worst: f64 = 0.0;
    for x in &xs {
        worst = worst.max(f.eval_at(x)?.distance(&g.eval_at(x)?));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{oplus_def1, otimes_def1};
    use crate::catalog;
    use crate::suite::{random_suite, SuiteConfig};

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn ramp_of_the_step() {
        let r = infconv_approx(&catalog::step_up(), 2, Direction::FromBelow).unwrap();
        // Oracle: inf_y (f(y) + 2|x - y|) by hand.
        let expected = crate::json::function_from_json(
            &serde_json::json!({"domain": ["-inf", "inf"], "pieces": [
                {"on": ["-inf", 0], "lower": "0"},
                {"on": [0, 0.5], "lower": "2*x"},
                {"on": [0.5, "inf"], "lower": "1"}]}),
            Mode::Rational,
        )
        .unwrap();
        assert!(r.equals(&expected, &EqConfig::exact()), "{r}");
        for x in [s(-3, 1), s(0, 1), s(1, 8), s(1, 2), s(5, 1)] {
            let brute = [s(-1000, 1), s(0, 1), s(1, 1000000), x.clone(), s(1000, 1)]
                .iter()
                .map(|y| {
                    let fy = catalog::step_up().eval_at(y).unwrap().lo().clone();
                    &fy + &(&Scalar::int(2) * &(&x - y).abs())
                })
                .min()
                .unwrap();
            assert_eq!(r.eval_at(&x).unwrap(), Interval::point(brute));
        }
    }

    #[test]
    fn lipschitz_functions_are_fixed() {
        let g = catalog::real_fn(-1, 1, crate::piecewise::parse_piece("3*x - 1", Mode::Rational).unwrap());
        let r = infconv_approx(&g, 5, Direction::FromBelow).unwrap();
        assert!(r.equals(&g, &EqConfig::exact()));
    }

    #[test]
    fn regularizations_increase_with_n() {
        for f in random_suite(&SuiteConfig { cases: 20, ..SuiteConfig::default() }) {
            let a = infconv_approx(&f, 1, Direction::FromBelow).unwrap();
            let b = infconv_approx(&f, 2, Direction::FromBelow).unwrap();
            assert!(func_leq(&a, &b).unwrap());
            assert!(func_leq(&b, &f).unwrap());
            let up = infconv_approx(&f, 2, Direction::FromAbove).unwrap();
            assert!(func_leq(&f, &up).unwrap());
        }
    }

    #[test]
    fn order_examples() {
        let (f, g) = (catalog::step_up(), catalog::step_down());
        assert!(func_leq(&g, &f).unwrap());
        assert!(!func_leq(&f, &g).unwrap());
        assert!(func_leq(&f, &f).unwrap());
        assert!(func_leq(&catalog::constant(-2), &catalog::sin_recip()).unwrap());
    }

    #[test]
    fn limit_of_ramps_is_the_step() {
        let seq = FunctionSequence::infconv(catalog::step_up(), Direction::FromBelow, 1);
        let lim = order_limit(&seq, 64).unwrap();
        assert!(lim.limit.equals(&catalog::step_up(), &EqConfig::exact()), "{}", lim.limit);
        assert_eq!(lim.witness_holds, Some(true));
    }

    #[test]
    fn limits_of_constant_sequences() {
        let f = catalog::step_up();
        let lim = order_limit(&FunctionSequence::constant(f.clone()), 16).unwrap();
        assert!(lim.limit.equals(&f, &EqConfig::exact()));
        let seq = FunctionSequence::new(Monotonicity::Increasing, |n| {
            let c = 1.0 - 2f64.powi(-(n.min(1000) as i32));
            Ok(HFunction::constant(crate::piecewise::Domain::real_line(), Scalar::Float(c)))
        });
        let lim = order_limit(&seq, 64).unwrap();
        assert!(lim.limit.equals(&catalog::constant(1), &EqConfig::default()));
    }

    #[test]
    fn def3_on_the_step_pair() {
        let (f, g) = (catalog::step_up(), catalog::step_down());
        let r = ring_op_def3(Op::Plus, &f, &g, 256).unwrap();
        assert!(r.result.equals(&catalog::constant(0), &EqConfig::exact()), "{}", r.result);
        let t = ring_op_def3(Op::Times, &f, &g, 256).unwrap();
        assert!(t.result.equals(&otimes_def1(&f, &g).unwrap().result, &EqConfig::exact()), "{}", t.result);
    }

    #[test]
    fn def3_matches_def1_on_suite_pairs() {
        let fs = random_suite(&SuiteConfig { cases: 8, ..SuiteConfig::default() });
        for i in 0..fs.len() {
            let (f, g) = (&fs[i], &fs[(i + 1) % fs.len()]);
            let d3 = ring_op_def3(Op::Plus, f, g, 1024).unwrap().result;
            let d1 = oplus_def1(f, g).unwrap().result;
            assert!(max_deviation(&d3, &d1, 200, 1).unwrap() <= 1e-3);
        }
    }

    #[test]
    fn mixture_interleaves() {
        let a = FunctionSequence::new(Monotonicity::Unordered, |n| Ok(catalog::constant(n as i64)));
        let b = FunctionSequence::new(Monotonicity::Unordered, |n| Ok(catalog::constant(-(n as i64))));
        let m = mixture(&a, &b);
        let got: Vec<Scalar> =
            (1..=6).map(|k| m.element(k).unwrap().eval_at(&Scalar::zero()).unwrap().lo().clone()).collect();
        assert_eq!(got, [1, -1, 2, -2, 3, -3].map(Scalar::int));
        let same = mixture(&a, &a);
        assert!(same.element(3).unwrap().equals(&a.element(2).unwrap(), &EqConfig::exact()));
    }

    #[test]
    fn mixed_ramps_still_converge_to_the_step() {
        let f = catalog::step_up();
        let m = mixture(
            &FunctionSequence::infconv(f.clone(), Direction::FromBelow, 1),
            &FunctionSequence::infconv(f.clone(), Direction::FromBelow, 2),
        );
        let lim = order_limit(&m, 128).unwrap();
        assert!(lim.limit.equals(&f, &EqConfig::exact()));
    }

    #[test]
    fn cauchy_witnesses() {
        let f = catalog::step_up();
        let seq = FunctionSequence::infconv(f.clone(), Direction::FromBelow, 1);
        let s2 = seq.clone();
        let beta = FunctionSequence::new(Monotonicity::Decreasing, move |n| {
            Ok(ring_op(Op::Plus, Definition::Completion, &f, &additive_inverse(&s2.element(n)?)?, &[])?.result)
        });
        let report = verify_cauchy(&seq, &beta, 6).unwrap();
        assert!(report.passed(), "{report:?}");

        let consts = FunctionSequence::constant(catalog::constant(3));
        let shrinking = FunctionSequence::new(Monotonicity::Decreasing, |n| {
            Ok(HFunction::constant(crate::piecewise::Domain::real_line(), Scalar::ratio(1, n as i64)))
        });
        assert!(verify_cauchy(&consts, &shrinking, 5).unwrap().passed());

        let flip = FunctionSequence::new(Monotonicity::Unordered, |n| {
            Ok(catalog::constant(if n % 2 == 0 { 1 } else { -1 }))
        });
        let r = verify_cauchy(&flip, &shrinking, 5).unwrap();
        assert!(!r.passed() && r.first_violation.is_some());
    }
}
