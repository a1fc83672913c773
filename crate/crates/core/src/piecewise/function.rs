//! Interval-valued functions on an open interval with finitely many nodes.
//!
//! A function is stored as a sorted list of nodes `x_1 < ... < x_m`, each
//! carrying an interval value, and `m + 1` open pieces between them. A piece
//! holds a lower and an upper expression (identical for real-valued pieces)
//! together with an envelope at each end: the liminf of the lower expression
//! and the limsup of the upper expression as the end is approached.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::PieceExpr;
use crate::baire::DenseSubset;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::scalar::{Mode, Scalar, FLOAT_TOL};

/// Samples per piece for the `lower <= upper` and evaluability checks.
const CHECK_SAMPLES: usize = 64;
/// Samples per piece when searching a denominator for a sign change.
const POLE_SAMPLES: usize = 256;

/// The open interval `(lo, hi)`; `None` stands for an infinite end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    lo: Option<Scalar>,
    hi: Option<Scalar>,
}

impl Domain {
    pub fn new(lo: Option<Scalar>, hi: Option<Scalar>) -> Result<Self> {
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a >= b {
                return Err(Error::InvalidFunction(format!("empty domain ({a}, {b})")));
            }
        }
        Ok(Domain { lo, hi })
    }

    pub fn real_line() -> Self {
        Domain { lo: None, hi: None }
    }

    pub fn open(lo: Scalar, hi: Scalar) -> Result<Self> {
        Domain::new(Some(lo), Some(hi))
    }

    pub fn lo(&self) -> Option<&Scalar> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&Scalar> {
        self.hi.as_ref()
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.lo.as_ref().is_none_or(|a| a < x) && self.hi.as_ref().is_none_or(|b| x < b)
    }

    /// A finite window used when sampling unbounded domains.
    pub fn window(&self) -> (Scalar, Scalar) {
        finite_window(self.lo.as_ref(), self.hi.as_ref())
    }

    /// Deterministic pseudo-random interior points, sorted.
    pub fn random_points(&self, count: usize, seed: u64, mode: Mode) -> Vec<Scalar> {
        let (a, b) = self.window();
        random_points_in(&a, &b, count, seed, mode)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), Scalar::to_text);
        let hi = self.hi.as_ref().map_or("inf".to_string(), Scalar::to_text);
        write!(f, "({lo}, {hi})")
    }
}

fn finite_window(lo: Option<&Scalar>, hi: Option<&Scalar>) -> (Scalar, Scalar) {
    let span = Scalar::int(10);
    match (lo, hi) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        (Some(a), None) => (a.clone(), a + &span),
        (None, Some(b)) => (b - &span, b.clone()),
        (None, None) => (-&span, span),
    }
}

/// `count` evenly spread interior points of `(a, b)`, exact when the ends are.
fn interior_points(a: &Scalar, b: &Scalar, count: usize) -> Vec<Scalar> {
    let len = b - a;
    let denom = Scalar::int(2 * count as i64);
    (0..count)
        .map(|k| {
            let t = Scalar::int(2 * k as i64 + 1).checked_div(&denom).unwrap_or_else(Scalar::zero);
            a + &(&len * &t)
        })
        .collect()
}

pub(crate) fn random_points_in(a: &Scalar, b: &Scalar, count: usize, seed: u64, mode: Mode) -> Vec<Scalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (fa, fb) = (a.to_f64(), b.to_f64());
    let mut out: Vec<Scalar> = (0..count)
        .filter_map(|_| {
            let t: f64 = rng.gen_range(0.0..1.0);
            let x = fa + (fb - fa) * t;
            Scalar::from_f64(x, mode)
        })
        .filter(|x| a < x && x < b)
        .collect();
    out.sort();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Computed from the piece expressions; a true one-sided limit.
    Evaluated,
    /// Supplied by the user.
    Declared,
    /// Observed by sampling the approach to the end.
    Estimated,
    /// Interval combination of operand envelopes; encloses the true range.
    Enclosed,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Evaluated => "evaluated",
            Provenance::Declared => "declared",
            Provenance::Estimated => "estimated",
            Provenance::Enclosed => "enclosed",
        }
    }
}

/// liminf of the lower expression and limsup of the upper expression at one
/// end of a piece.
#[derive(Clone, Debug, PartialEq)]
pub struct EndEnvelope {
    pub liminf: Scalar,
    pub limsup: Scalar,
    pub provenance: Provenance,
}

impl EndEnvelope {
    pub fn evaluated(lo: Scalar, hi: Scalar) -> Self {
        EndEnvelope { liminf: lo, limsup: hi, provenance: Provenance::Evaluated }
    }

    pub fn declared(liminf: Scalar, limsup: Scalar) -> Self {
        EndEnvelope { liminf, limsup, provenance: Provenance::Declared }
    }

    pub fn is_evaluated(&self) -> bool {
        self.provenance == Provenance::Evaluated
    }

    pub fn as_interval(&self) -> Result<Interval> {
        Interval::new(self.liminf.clone(), self.limsup.clone())
    }

    fn combine(&self, other: &EndEnvelope, op: impl Fn(&Interval, &Interval) -> Interval) -> Result<EndEnvelope> {
        let r = op(&self.as_interval()?, &other.as_interval()?);
        let provenance = if self.is_evaluated() && other.is_evaluated() {
            Provenance::Evaluated
        } else {
            Provenance::Enclosed
        };
        let (liminf, limsup) = r.into_bounds();
        Ok(EndEnvelope { liminf, limsup, provenance })
    }

    fn negated(&self) -> EndEnvelope {
        EndEnvelope { liminf: -&self.limsup, limsup: -&self.liminf, provenance: self.provenance }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A continuous piece on an open subinterval.
#[derive(Clone, Debug)]
pub struct Piece {
    pub lower: PieceExpr,
    pub upper: PieceExpr,
    pub left: Option<EndEnvelope>,
    pub right: Option<EndEnvelope>,
}

impl Piece {
    pub fn real(expr: PieceExpr) -> Self {
        Piece { lower: expr.clone(), upper: expr, left: None, right: None }
    }

    pub fn is_real(&self) -> bool {
        self.lower.same_as(&self.upper, FLOAT_TOL)
    }

    pub fn is_linear(&self) -> bool {
        self.lower.is_linear() && self.upper.is_linear()
    }

    pub fn eval(&self, x: &Scalar) -> Option<Interval> {
        let lo = self.lower.eval(x)?;
        let hi = if self.is_real() { lo.clone() } else { self.upper.eval(x)? };
        Interval::new(lo, hi).ok()
    }

    pub fn envelope(&self, side: Side) -> Option<&EndEnvelope> {
        match side {
            Side::Left => self.left.as_ref(),
            Side::Right => self.right.as_ref(),
        }
    }

    fn same_exprs(&self, other: &Piece) -> bool {
        self.lower.same_as(&other.lower, FLOAT_TOL) && self.upper.same_as(&other.upper, FLOAT_TOL)
    }

    /// The real-valued piece carrying one branch. Evaluated envelopes are
    /// recomputed for the branch; other envelopes are kept, which encloses
    /// the branch's true range at that end.
    pub(crate) fn branch(&self, upper: bool, left_end: Option<&Scalar>, right_end: Option<&Scalar>) -> Piece {
        let expr = if upper { self.upper.clone() } else { self.lower.clone() };
        let reenv = |env: &Option<EndEnvelope>, end: Option<&Scalar>| -> Option<EndEnvelope> {
            let env = env.as_ref()?;
            if env.is_evaluated() && !self.is_real() {
                let v = expr.eval(end?)?;
                Some(EndEnvelope::evaluated(v.clone(), v))
            } else {
                Some(env.clone())
            }
        };
        Piece {
            lower: expr.clone(),
            upper: expr.clone(),
            left: reenv(&self.left, left_end),
            right: reenv(&self.right, right_end),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub x: Scalar,
    pub value: Interval,
}

/// An interval-valued function with finitely many nodes; the concrete
/// representation of elements of the Hausdorff continuous function ring.
#[derive(Clone, Debug)]
pub struct HFunction {
    domain: Domain,
    nodes: Vec<Node>,
    pieces: Vec<Piece>,
}

/// How two functions are compared for equality.
#[derive(Clone, Copy, Debug)]
pub struct EqConfig {
    pub tol: f64,
    pub seed: u64,
    pub samples_per_piece: usize,
}

impl Default for EqConfig {
    fn default() -> Self {
        EqConfig { tol: FLOAT_TOL, seed: 0x5eed, samples_per_piece: 128 }
    }
}

impl EqConfig {
    pub fn exact() -> Self {
        EqConfig { tol: 0.0, ..EqConfig::default() }
    }
}

impl HFunction {
    /// Builds a function from raw parts, checking every representation
    /// invariant. Missing envelopes at interior ends are resolved by
    /// evaluating the piece expressions, falling back to sampling.
    pub fn from_parts(domain: Domain, nodes: Vec<Node>, pieces: Vec<Piece>) -> Result<Self> {
        HFunction::build(domain, nodes, pieces, true)
    }

    /// As [`HFunction::from_parts`] without the sampled piece checks, for
    /// pieces known to be valid (linear pieces built by the library).
    pub(crate) fn from_trusted_parts(domain: Domain, nodes: Vec<Node>, pieces: Vec<Piece>) -> Result<Self> {
        HFunction::build(domain, nodes, pieces, false)
    }

    fn build(domain: Domain, nodes: Vec<Node>, mut pieces: Vec<Piece>, check: bool) -> Result<Self> {
        if pieces.len() != nodes.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "{} nodes need {} pieces, got {}",
                nodes.len(),
                nodes.len() + 1,
                pieces.len()
            )));
        }
        for w in nodes.windows(2) {
            if w[0].x >= w[1].x {
                return Err(Error::InvalidFunction(format!("nodes not increasing at {}", w[1].x)));
            }
        }
        for n in &nodes {
            if !domain.contains(&n.x) {
                return Err(Error::InvalidFunction(format!("node {} is not interior to {domain}", n.x)));
            }
        }
        for i in 0..pieces.len() {
            let (a, b) = piece_bounds(&domain, &nodes, i);
            let piece = &mut pieces[i];
            if check {
                check_piece(piece, a.as_ref(), b.as_ref())?;
            }
            if piece.left.is_none() {
                piece.left = resolve_envelope(piece, a.as_ref(), b.as_ref(), Side::Left);
            }
            if piece.right.is_none() {
                piece.right = resolve_envelope(piece, a.as_ref(), b.as_ref(), Side::Right);
            }
            let interior_left = i > 0;
            let interior_right = i < nodes.len();
            for (env, interior, end) in [(&piece.left, interior_left, &a), (&piece.right, interior_right, &b)] {
                match env {
                    None if interior => {
                        return Err(Error::InvalidFunction(format!(
                            "piece {i} has no usable limit at {}",
                            end.as_ref().map(Scalar::to_text).unwrap_or_default()
                        )))
                    }
                    Some(e) if e.liminf > e.limsup => {
                        return Err(Error::MalformedEnvelope {
                            x: end.as_ref().map(Scalar::to_text).unwrap_or_default(),
                            liminf: e.liminf.to_text(),
                            limsup: e.limsup.to_text(),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(HFunction { domain, nodes, pieces })
    }

    /// Internal constructor for operator outputs whose invariants follow
    /// from the inputs.
    pub(crate) fn from_parts_unchecked(domain: Domain, nodes: Vec<Node>, pieces: Vec<Piece>) -> Self {
        debug_assert_eq!(pieces.len(), nodes.len() + 1);
        HFunction { domain, nodes, pieces }
    }

    pub fn constant(domain: Domain, c: Scalar) -> Self {
        HFunction::real(domain, PieceExpr::constant(c)).expect("constants are valid on any domain")
    }

    /// A real function given by one expression on the whole domain.
    pub fn real(domain: Domain, expr: PieceExpr) -> Result<Self> {
        HFunction::from_parts(domain, Vec::new(), vec![Piece::real(expr)])
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Bounds of piece `i`; `None` marks an infinite domain end.
    pub fn piece_bounds(&self, i: usize) -> (Option<Scalar>, Option<Scalar>) {
        piece_bounds(&self.domain, &self.nodes, i)
    }

    pub fn node_index(&self, x: &Scalar) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.x.cmp(x)).ok()
    }

    /// Index of the piece containing a non-node point.
    fn piece_index(&self, x: &Scalar) -> usize {
        self.nodes.partition_point(|n| n.x < *x)
    }

    /// Envelope of the piece abutting node `k` from the given side.
    pub fn node_envelope(&self, k: usize, side: Side) -> &EndEnvelope {
        let env = match side {
            Side::Left => self.pieces[k].right.as_ref(),
            Side::Right => self.pieces[k + 1].left.as_ref(),
        };
        env.expect("interior piece ends always carry an envelope")
    }

    /// `[min liminf, max limsup]` over both sides of node `k`, i.e. the value
    /// of the punctured graph completion there.
    pub fn punctured_completion(&self, k: usize) -> Interval {
        let l = self.node_envelope(k, Side::Left);
        let r = self.node_envelope(k, Side::Right);
        Interval::hull_of(l.liminf.clone().min(r.liminf.clone()), l.limsup.clone().max(r.limsup.clone()))
    }

    pub fn eval_at(&self, x: &Scalar) -> Result<Interval> {
        if !self.domain.contains(x) {
            return Err(Error::Domain(x.to_text()));
        }
        if let Some(k) = self.node_index(x) {
            return Ok(self.nodes[k].value.clone());
        }
        let piece = &self.pieces[self.piece_index(x)];
        piece.eval(x).ok_or_else(|| Error::Eval(format!("piece expression undefined at {x}")))
    }

    pub fn is_real_valued(&self) -> bool {
        self.pieces.iter().all(Piece::is_real) && self.nodes.iter().all(|n| n.value.is_point())
    }

    /// True when every piece is linear in both branches.
    pub fn is_piecewise_linear(&self) -> bool {
        self.pieces.iter().all(Piece::is_linear)
    }

    pub fn has_declared_envelopes(&self) -> bool {
        self.pieces
            .iter()
            .flat_map(|p| [&p.left, &p.right])
            .flatten()
            .any(|e| !e.is_evaluated())
    }

    /// Inserts nodes at the given points (ignoring existing nodes). The new
    /// node values are the piece values there.
    pub fn refine(&self, xs: &[Scalar]) -> Result<HFunction> {
        let mut out = self.clone();
        for x in xs {
            if out.node_index(x).is_some() {
                continue;
            }
            if !out.domain.contains(x) {
                return Err(Error::Domain(x.to_text()));
            }
            let i = out.piece_index(x);
            let piece = &out.pieces[i];
            let value = piece
                .eval(x)
                .ok_or_else(|| Error::Eval(format!("cannot split piece at {x}")))?;
            let env = EndEnvelope::evaluated(value.lo().clone(), value.hi().clone());
            let left = Piece { right: Some(env.clone()), ..piece.clone() };
            let right = Piece { left: Some(env), ..piece.clone() };
            out.pieces.splice(i..=i, [left, right]);
            out.nodes.insert(i, Node { x: x.clone(), value });
        }
        Ok(out)
    }

    /// Replaces the value at node `x`, inserting the node if needed.
    pub fn with_value_at(&self, x: &Scalar, value: Interval) -> Result<HFunction> {
        let mut out = self.refine(std::slice::from_ref(x))?;
        let k = out.node_index(x).expect("node was just inserted");
        out.nodes[k].value = value;
        Ok(out)
    }

    /// Overrides the envelope at node `x` on one or both sides.
    pub fn declare_envelope(&self, x: &Scalar, sides: &[Side], env: EndEnvelope) -> Result<HFunction> {
        if env.liminf > env.limsup {
            return Err(Error::MalformedEnvelope {
                x: x.to_text(),
                liminf: env.liminf.to_text(),
                limsup: env.limsup.to_text(),
            });
        }
        let k = self
            .node_index(x)
            .ok_or_else(|| Error::InvalidFunction(format!("no node at {x} to attach an envelope to")))?;
        let mut out = self.clone();
        for side in sides {
            match side {
                Side::Left => out.pieces[k].right = Some(env.clone()),
                Side::Right => out.pieces[k + 1].left = Some(env.clone()),
            }
        }
        Ok(out)
    }

    /// Canonical form: drops every node whose value is the common value of
    /// two identical, continuously meeting neighbouring pieces.
    pub fn normalize(mut self) -> HFunction {
        let mut k = 0;
        while k < self.nodes.len() {
            if self.node_is_removable(k) {
                let right = self.pieces.remove(k + 1);
                self.pieces[k].right = right.right;
                self.nodes.remove(k);
            } else {
                k += 1;
            }
        }
        self
    }

    fn node_is_removable(&self, k: usize) -> bool {
        let (l, r) = (&self.pieces[k], &self.pieces[k + 1]);
        if !l.same_exprs(r) {
            return false;
        }
        let (le, re) = (self.node_envelope(k, Side::Left), self.node_envelope(k, Side::Right));
        if !le.is_evaluated() || !re.is_evaluated() {
            return false;
        }
        let v = &self.nodes[k].value;
        let tol = FLOAT_TOL;
        le.liminf.approx_eq(v.lo(), tol)
            && le.limsup.approx_eq(v.hi(), tol)
            && re.liminf.approx_eq(v.lo(), tol)
            && re.limsup.approx_eq(v.hi(), tol)
    }

    /// Maps every piece and node through `f`, keeping envelopes as produced.
    pub(crate) fn map_parts(
        &self,
        node: impl Fn(&Node) -> Interval,
        piece: impl Fn(usize, &Piece) -> Piece,
    ) -> HFunction {
        HFunction {
            domain: self.domain.clone(),
            nodes: self.nodes.iter().map(|n| Node { x: n.x.clone(), value: node(n) }).collect(),
            pieces: self.pieces.iter().enumerate().map(|(i, p)| piece(i, p)).collect(),
        }
    }

    /// The pointwise negation `x -> [-hi(x), -lo(x)]`.
    pub fn negate(&self) -> HFunction {
        self.map_parts(
            |n| n.value.neg(),
            |_, p| Piece {
                lower: p.upper.neg(),
                upper: if p.is_real() { p.upper.neg() } else { p.lower.neg() },
                left: p.left.as_ref().map(EndEnvelope::negated),
                right: p.right.as_ref().map(EndEnvelope::negated),
            },
        )
    }

    /// Points where the value has positive width, plus proper-interval pieces.
    pub fn interval_support(&self) -> Support {
        Support {
            points: self
                .nodes
                .iter()
                .filter(|n| !n.value.is_point())
                .map(|n| n.x.clone())
                .collect(),
            pieces: (0..self.pieces.len())
                .filter(|&i| !self.pieces[i].is_real())
                .map(|i| self.piece_bounds(i))
                .collect(),
        }
    }

    /// Structural and value equality after aligning node sets. Node values
    /// compare within `cfg.tol` (exactly for exact scalars); pieces compare
    /// symbolically when polynomial and by seeded sampling otherwise.
    pub fn equals(&self, other: &HFunction, cfg: &EqConfig) -> bool {
        self.first_difference(other, cfg).is_none()
    }

    /// A location where the two functions differ, if any.
    pub fn first_difference(&self, other: &HFunction, cfg: &EqConfig) -> Option<String> {
        if self.domain != other.domain {
            return Some(format!("domains differ: {} vs {}", self.domain, other.domain));
        }
        let (f, g) = match align(self, other) {
            Ok(pair) => pair,
            Err(e) => return Some(format!("cannot align: {e}")),
        };
        for (a, b) in f.nodes.iter().zip(&g.nodes) {
            if !a.value.approx_eq(&b.value, cfg.tol) {
                return Some(format!("at x = {}: {} vs {}", a.x, a.value, b.value));
            }
        }
        for i in 0..f.pieces.len() {
            let (p, q) = (&f.pieces[i], &g.pieces[i]);
            if let Some(x) = pieces_differ(p, q, &f.piece_bounds(i), cfg, i as u64) {
                return Some(format!("on piece {} near x = {x}", i));
            }
        }
        None
    }

    /// Deterministic pseudo-random points of the domain that are not nodes.
    pub fn sample_points(&self, count: usize, seed: u64, mode: Mode) -> Vec<Scalar> {
        self.domain
            .random_points(count, seed, mode)
            .into_iter()
            .filter(|x| self.node_index(x).is_none())
            .collect()
    }

    pub(crate) fn set_node_value(&mut self, k: usize, value: Interval) {
        self.nodes[k].value = value;
    }

    pub fn node_xs(&self) -> Vec<Scalar> {
        self.nodes.iter().map(|n| n.x.clone()).collect()
    }
}

/// Where a function takes proper-interval values.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub points: Vec<Scalar>,
    pub pieces: Vec<(Option<Scalar>, Option<Scalar>)>,
}

impl Support {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.pieces.is_empty()
    }
}

fn pieces_differ(
    p: &Piece,
    q: &Piece,
    bounds: &(Option<Scalar>, Option<Scalar>),
    cfg: &EqConfig,
    salt: u64,
) -> Option<String> {
    let symbolic = |a: &PieceExpr, b: &PieceExpr| match (a.as_poly(), b.as_poly()) {
        (Some(pa), Some(pb)) => Some(pa.approx_eq(&pb, cfg.tol)),
        _ => None,
    };
    match (symbolic(&p.lower, &q.lower), symbolic(&p.upper, &q.upper)) {
        (Some(true), Some(true)) => return None,
        (Some(false), _) | (_, Some(false)) => return Some("symbolic mismatch".into()),
        _ => {}
    }
    let (a, b) = finite_window(bounds.0.as_ref(), bounds.1.as_ref());
    let tol = cfg.tol.max(FLOAT_TOL);
    for x in random_points_in(&a, &b, cfg.samples_per_piece, cfg.seed ^ salt.wrapping_mul(0x9e37), Mode::Float) {
        match (p.eval(&x), q.eval(&x)) {
            (Some(u), Some(v)) if u.approx_eq(&v, tol) => {}
            _ => return Some(x.to_text()),
        }
    }
    None
}

fn piece_bounds(domain: &Domain, nodes: &[Node], i: usize) -> (Option<Scalar>, Option<Scalar>) {
    let lo = if i == 0 { domain.lo.clone() } else { Some(nodes[i - 1].x.clone()) };
    let hi = if i == nodes.len() { domain.hi.clone() } else { Some(nodes[i].x.clone()) };
    (lo, hi)
}

fn check_piece(piece: &Piece, a: Option<&Scalar>, b: Option<&Scalar>) -> Result<()> {
    let (wa, wb) = finite_window(a, b);
    let show = || format!("({}, {})", wa, wb);
    for x in interior_points(&wa, &wb, CHECK_SAMPLES) {
        let lo = piece
            .lower
            .eval(&x)
            .ok_or_else(|| Error::InvalidFunction(format!("`{}` is undefined at {x} in {}", piece.lower, show())))?;
        let hi = piece
            .upper
            .eval(&x)
            .ok_or_else(|| Error::InvalidFunction(format!("`{}` is undefined at {x} in {}", piece.upper, show())))?;
        if !lo.approx_le(&hi, FLOAT_TOL) {
            return Err(Error::InvalidFunction(format!(
                "lower exceeds upper at {x}: {lo} > {hi}"
            )));
        }
    }
    for expr in [&piece.lower, &piece.upper] {
        for den in expr.denominators() {
            if let Some(pole) = find_pole(den, &wa, &wb) {
                return Err(Error::InvalidFunction(format!(
                    "`{expr}` has a pole near {pole} inside {}",
                    show()
                )));
            }
        }
    }
    Ok(())
}

fn find_pole(den: &super::expr::Expr, a: &Scalar, b: &Scalar) -> Option<String> {
    if let Some(p) = den.as_poly() {
        let c: Vec<f64> = p.coeffs().iter().map(Scalar::to_f64).collect();
        let (fa, fb) = (a.to_f64(), b.to_f64());
        let inside = |r: f64| fa < r && r < fb;
        match c.len() {
            0 => return Some(format!("{a}")),
            1 => return None,
            2 => {
                let r = -c[0] / c[1];
                return inside(r).then(|| r.to_string());
            }
            3 => {
                let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
                if disc < 0.0 {
                    return None;
                }
                let s = disc.sqrt();
                return [(-c[1] - s) / (2.0 * c[2]), (-c[1] + s) / (2.0 * c[2])]
                    .into_iter()
                    .find(|&r| inside(r))
                    .map(|r| r.to_string());
            }
            _ => {}
        }
    }
    let pts = interior_points(a, b, POLE_SAMPLES);
    let vals: Vec<Option<f64>> = pts.iter().map(|x| den.eval(x).map(|v| v.to_f64())).collect();
    for (i, w) in vals.windows(2).enumerate() {
        match (w[0], w[1]) {
            (Some(u), _) if u == 0.0 => return Some(pts[i].to_text()),
            (Some(u), Some(v)) if u.signum() != v.signum() && v != 0.0 => return Some(pts[i].to_text()),
            _ => {}
        }
    }
    None
}

/// Evaluated limit when the expressions extend continuously to the end,
/// otherwise a sampled estimate of the approach.
fn resolve_envelope(piece: &Piece, a: Option<&Scalar>, b: Option<&Scalar>, side: Side) -> Option<EndEnvelope> {
    let end = match side {
        Side::Left => a?,
        Side::Right => b?,
    };
    if let (Some(lo), Some(hi)) = (piece.lower.eval(end), piece.upper.eval(end)) {
        return Some(EndEnvelope::evaluated(lo, hi));
    }
    let (wa, wb) = finite_window(a, b);
    let half = (wb.to_f64() - wa.to_f64()) / 2.0;
    let start = half.min(1.0);
    let e = end.to_f64();
    let dir = if side == Side::Left { 1.0 } else { -1.0 };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..96 {
        let d = start * 10f64.powf(-(k as f64) / 8.0);
        let x = Scalar::Float(e + dir * d);
        let l = piece.lower.eval(&x)?.to_f64();
        let u = piece.upper.eval(&x)?.to_f64();
        lo = lo.min(l);
        hi = hi.max(u);
    }
    Some(EndEnvelope {
        liminf: Scalar::float(lo)?,
        limsup: Scalar::float(hi)?,
        provenance: Provenance::Estimated,
    })
}

/// Refines both functions to the union of their node sets.
pub fn align(f: &HFunction, g: &HFunction) -> Result<(HFunction, HFunction)> {
    if f.domain != g.domain {
        return Err(Error::InvalidFunction(format!("domains differ: {} vs {}", f.domain, g.domain)));
    }
    Ok((f.refine(&g.node_xs())?, g.refine(&f.node_xs())?))
}

fn pointwise(
    f: &HFunction,
    g: &HFunction,
    node_op: impl Fn(&Interval, &Interval) -> Interval,
    piece_op: impl Fn(&Piece, &Piece) -> (PieceExpr, PieceExpr),
) -> Result<HFunction> {
    let (f, g) = align(f, g)?;
    let nodes = f
        .nodes
        .iter()
        .zip(&g.nodes)
        .map(|(a, b)| Node { x: a.x.clone(), value: node_op(&a.value, &b.value) })
        .collect();
    let mut pieces = Vec::with_capacity(f.pieces.len());
    for (p, q) in f.pieces.iter().zip(&g.pieces) {
        let (lower, upper) = piece_op(p, q);
        let env = |a: &Option<EndEnvelope>, b: &Option<EndEnvelope>| -> Result<Option<EndEnvelope>> {
            match (a, b) {
                (Some(a), Some(b)) => a.combine(b, &node_op).map(Some),
                _ => Ok(None),
            }
        };
        pieces.push(Piece { lower, upper, left: env(&p.left, &q.left)?, right: env(&p.right, &q.right)? });
    }
    Ok(HFunction::from_parts_unchecked(f.domain.clone(), nodes, pieces))
}

/// `(f + g)(x) = f(x) + g(x)` computed piece by piece.
pub fn pointwise_add(f: &HFunction, g: &HFunction) -> Result<HFunction> {
    pointwise(f, g, Interval::add, |p, q| {
        let lower = p.lower.add(&q.lower);
        let upper = if p.is_real() && q.is_real() { lower.clone() } else { p.upper.add(&q.upper) };
        (lower, upper)
    })
}

/// `(f * g)(x) = f(x) * g(x)` computed piece by piece.
pub fn pointwise_mul(f: &HFunction, g: &HFunction) -> Result<HFunction> {
    pointwise(f, g, Interval::mul, |p, q| {
        if p.is_real() && q.is_real() {
            let e = p.lower.mul(&q.lower);
            return (e.clone(), e);
        }
        let products = [
            p.lower.mul(&q.lower),
            p.lower.mul(&q.upper),
            p.upper.mul(&q.lower),
            p.upper.mul(&q.upper),
        ];
        let lower = products[1..].iter().fold(products[0].clone(), |acc, e| acc.min(e));
        let upper = products[1..].iter().fold(products[0].clone(), |acc, e| acc.max(e));
        (lower, upper)
    })
}

/// The dense set of points where every function of the set is point valued.
pub fn common_point_domain(fs: &[&HFunction]) -> DenseSubset {
    let mut excluded: Vec<Scalar> = fs.iter().flat_map(|f| f.interval_support().points).collect();
    excluded.sort();
    excluded.dedup();
    DenseSubset::excluding(excluded)
}

/// Hausdorff continuity: real-valued pieces, and each node value equal to
/// the completion of the two one-sided envelopes.
pub fn is_h_continuous(f: &HFunction) -> bool {
    h_continuity_violation(f, None).is_none()
}

/// First reason `f` fails Hausdorff continuity on `D`; nodes in
/// `excluded` are not checked.
pub(crate) fn h_continuity_violation(f: &HFunction, excluded: Option<&DenseSubset>) -> Option<String> {
    if let Some(i) = f.pieces.iter().position(|p| !p.is_real()) {
        return Some(format!("piece {i} is interval valued"));
    }
    for (k, node) in f.nodes.iter().enumerate() {
        if excluded.is_some_and(|d| d.excludes(&node.x)) {
            continue;
        }
        let completed = f.punctured_completion(k);
        if !node.value.approx_eq(&completed, FLOAT_TOL) {
            return Some(format!("value {} at {} differs from its completion {}", node.value, node.x, completed));
        }
    }
    None
}

/// S-continuity: the function is a fixed point of graph completion.
pub fn is_s_continuous(f: &HFunction) -> bool {
    match crate::baire::graph_completion(f, &DenseSubset::all()) {
        Ok(c) => {
            let refined = match c.refine(&f.node_xs()) {
                Ok(r) => r,
                Err(_) => return false,
            };
            f.nodes.iter().all(|n| {
                let k = refined.node_index(&n.x).expect("refined on f's nodes");
                refined.nodes[k].value.approx_eq(&n.value, FLOAT_TOL)
            })
        }
        Err(_) => false,
    }
}

/// One envelope check from [`validate_envelopes`].
#[derive(Clone, Debug)]
pub struct EnvelopeCheck {
    pub x: Scalar,
    pub side: Side,
    pub provenance: Provenance,
    pub liminf: Scalar,
    pub limsup: Scalar,
    pub observed_min: f64,
    pub observed_max: f64,
    pub problems: Vec<String>,
}

impl EnvelopeCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnvelopeReport {
    pub checks: Vec<EnvelopeCheck>,
}

impl EnvelopeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(EnvelopeCheck::passed)
    }
}

/// Decades of distance sampled when approaching a piece end.
const VALIDATE_DECADES: usize = 8;

/// Samples each non-evaluated interior envelope on a geometric sequence
/// approaching its end and flags values outside `[liminf - eps, limsup + eps]`
/// near the end, or a declared bound that the observed range never gets
/// within `eps` of. Extremal samples are refined by golden-section search.
pub fn validate_envelopes(f: &HFunction, samples_per_decade: usize, eps: f64) -> EnvelopeReport {
    let mut report = EnvelopeReport::default();
    for k in 0..f.nodes.len() {
        for side in [Side::Left, Side::Right] {
            let (piece, env) = match side {
                Side::Left => (&f.pieces[k], f.node_envelope(k, Side::Left)),
                Side::Right => (&f.pieces[k + 1], f.node_envelope(k, Side::Right)),
            };
            if env.is_evaluated() {
                continue;
            }
            let idx = if side == Side::Left { k } else { k + 1 };
            let (a, b) = f.piece_bounds(idx);
            let (wa, wb) = finite_window(a.as_ref(), b.as_ref());
            let start = ((wb.to_f64() - wa.to_f64()) / 2.0).min(1.0);
            report.checks.push(check_envelope(
                piece,
                &f.nodes[k].x,
                side,
                env,
                start,
                samples_per_decade.max(1),
                eps,
            ));
        }
    }
    report
}

fn check_envelope(
    piece: &Piece,
    x: &Scalar,
    side: Side,
    env: &EndEnvelope,
    start: f64,
    spd: usize,
    eps: f64,
) -> EnvelopeCheck {
    let e = x.to_f64();
    // Approaching node x from the left means sampling x - d.
    let dir = if side == Side::Left { -1.0 } else { 1.0 };
    let at = |d: f64| -> Option<(f64, f64)> {
        let p = Scalar::Float(e + dir * d);
        Some((piece.lower.eval(&p)?.to_f64(), piece.upper.eval(&p)?.to_f64()))
    };
    let total = VALIDATE_DECADES * spd;
    let ds: Vec<f64> = (0..=total).map(|k| start * 10f64.powf(-(k as f64) / spd as f64)).collect();
    let vals: Vec<Option<(f64, f64)>> = ds.iter().map(|&d| at(d)).collect();
    let mut problems = Vec::new();
    if vals.iter().any(Option::is_none) {
        problems.push("piece is undefined on the approach".to_string());
    }
    // The last decade decides whether values stay inside the envelope; the
    // last two decades (with refinement) whether they reach it.
    let tail_from = total.saturating_sub(spd);
    let reach_from = total.saturating_sub(2 * spd);
    let (mut tail_min, mut tail_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals[tail_from..].iter().flatten() {
        tail_min = tail_min.min(v.0);
        tail_max = tail_max.max(v.1);
    }
    let lower_at = |d: f64| at(d).map_or(f64::INFINITY, |v| v.0);
    let upper_at = |d: f64| at(d).map_or(f64::NEG_INFINITY, |v| -v.1);
    let reach_min = refine_extreme(&ds[reach_from..], &lower_at);
    let reach_max = -refine_extreme(&ds[reach_from..], &upper_at);
    let observed_min = tail_min.min(reach_min);
    let observed_max = tail_max.max(reach_max);
    let (li, ls) = (env.liminf.to_f64(), env.limsup.to_f64());
    if observed_min < li - eps {
        problems.push(format!("observed {observed_min} below liminf {li}"));
    }
    if observed_max > ls + eps {
        problems.push(format!("observed {observed_max} above limsup {ls}"));
    }
    if reach_min > li + eps {
        problems.push(format!("approach never gets within {eps} of liminf {li} (min {reach_min})"));
    }
    if reach_max < ls - eps {
        problems.push(format!("approach never gets within {eps} of limsup {ls} (max {reach_max})"));
    }
    EnvelopeCheck {
        x: x.clone(),
        side,
        provenance: env.provenance,
        liminf: env.liminf.clone(),
        limsup: env.limsup.clone(),
        observed_min,
        observed_max,
        problems,
    }
}

/// Minimum of `g` over the sample distances, polished by golden-section
/// search around the best few samples.
fn refine_extreme(ds: &[f64], g: &dyn Fn(f64) -> f64) -> f64 {
    let vals: Vec<f64> = ds.iter().map(|&d| g(d)).collect();
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    for &i in order.iter().take(8) {
        let lo = ds[(i + 1).min(ds.len() - 1)];
        let hi = ds[i.saturating_sub(1)];
        best = best.min(golden_min(g, lo.min(hi), lo.max(hi)));
    }
    best
}

fn golden_min(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    gc.min(gd)
}

impl fmt::Display for HFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "on {}:", self.domain)?;
        for (i, p) in self.pieces.iter().enumerate() {
            if p.is_real() {
                write!(f, " {}", p.lower)?;
            } else {
                write!(f, " [{}, {}]", p.lower, p.upper)?;
            }
            if let Some(n) = self.nodes.get(i) {
                write!(f, " | {} @ {} |", n.value, n.x)?;
            }
        }
        Ok(())
    }
}
