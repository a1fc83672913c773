//! Ring operations on Hausdorff continuous functions.
//!
//! `f ⊕ g` is the unique H-continuous function contained in the pointwise
//! sum `f + g`; `f ⊗ g` likewise for the product. Three routes compute it:
//!
//! * completion: `F(I(S(f + g)))`, cross-checked against `F(S(I(f + g)))`;
//! * restriction: `F(D_fg, Ω, f + g)` where `D_fg` drops the points at
//!   which either operand is interval valued;
//! * order limits of continuous approximations (see [`crate::order`]).

use std::fmt;

use rayon::prelude::*;

use crate::baire::{fis, fsi, graph_completion, DenseSubset};
use crate::error::{Error, Result};
use crate::json::{EnvelopeDecl, FunctionFile};
use crate::piecewise::{
    common_point_domain, h_continuity_violation, pointwise_add, pointwise_mul, validate_envelopes, EndEnvelope,
    EqConfig, HFunction, Provenance,
};
use crate::scalar::Scalar;
use crate::suite::{random_suite, SuiteConfig};

/// Samples per decade and tolerance used to vet declared envelopes.
const ENVELOPE_SAMPLES_PER_DECADE: usize = 50;
const ENVELOPE_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Plus,
    Times,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Plus => "+",
            Op::Times => "*",
        }
    }

    pub fn pointwise(self, f: &HFunction, g: &HFunction) -> Result<HFunction> {
        match self {
            Op::Plus => pointwise_add(f, g),
            Op::Times => pointwise_mul(f, g),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Definition {
    /// Completion of the pointwise result.
    Completion,
    /// Extension from the common point-valued set.
    Restriction,
    /// Order limit of continuous approximations at the given depth.
    OrderLimit { depth: u64 },
}

impl Definition {
    pub fn number(self) -> u8 {
        match self {
            Definition::Completion => 1,
            Definition::Restriction => 2,
            Definition::OrderLimit { .. } => 3,
        }
    }
}

/// A ring operation result together with the intermediate functions.
#[derive(Clone, Debug)]
pub struct OpReport {
    pub result: HFunction,
    pub pointwise: HFunction,
    pub witnesses: Vec<(String, HFunction)>,
    pub definition: Definition,
}

pub(crate) fn require_h_continuous(f: &HFunction, what: &str) -> Result<()> {
    match h_continuity_violation(f, None) {
        Some(reason) => Err(Error::NotHContinuous(format!("{what}: {reason}"))),
        None => Ok(()),
    }
}

/// Applies declarations to the pointwise result and vets them by sampling.
fn declare(mut p: HFunction, decls: &[EnvelopeDecl]) -> Result<HFunction> {
    if decls.is_empty() {
        return Ok(p);
    }
    for d in decls {
        p = p.declare_envelope(&d.at, &d.sides, EndEnvelope::declared(d.liminf.clone(), d.limsup.clone()))?;
    }
    let report = validate_envelopes(&p, ENVELOPE_SAMPLES_PER_DECADE, ENVELOPE_EPS);
    if let Some(bad) = report.checks.iter().find(|c| c.provenance == Provenance::Declared && !c.passed()) {
        return Err(Error::EnvelopeRejected { x: bad.x.to_text(), reason: bad.problems.join("; ") });
    }
    Ok(p)
}

/// `F(D, Ω, φ)`: the unique H-continuous function agreeing with `φ` on `D`.
pub fn extend(phi: &HFunction, d: &DenseSubset) -> Result<HFunction> {
    if let Some(reason) = h_continuity_violation(phi, Some(d)) {
        return Err(Error::NotHContinuous(format!("not H-continuous on D: {reason}")));
    }
    graph_completion(phi, d)
}

/// `f ⊕ g` or `f ⊗ g` by the given definition. `decls` override envelopes
/// of the pointwise result.
pub fn ring_op(op: Op, def: Definition, f: &HFunction, g: &HFunction, decls: &[EnvelopeDecl]) -> Result<OpReport> {
    require_h_continuous(f, "left operand")?;
    require_h_continuous(g, "right operand")?;
    match def {
        Definition::Completion => {
            let p = declare(op.pointwise(f, g)?, decls)?;
            let via_is = fis(&p)?;
            let via_si = fsi(&p)?;
            if let Some(diff) = via_is.first_difference(&via_si, &EqConfig::default()) {
                return Err(Error::InternalConsistency(format!("F(I(S)) and F(S(I)) routes differ {diff}")));
            }
            Ok(OpReport { result: via_is, pointwise: p, witnesses: vec![("fsi".into(), via_si)], definition: def })
        }
        Definition::Restriction => {
            let p = declare(op.pointwise(f, g)?, decls)?;
            let d = common_point_domain(&[f, g]);
            let result = extend(&p, &d)?;
            Ok(OpReport { result, pointwise: p, witnesses: Vec::new(), definition: def })
        }
        Definition::OrderLimit { depth } => crate::order::ring_op_def3(op, f, g, depth),
    }
}

pub fn oplus_def1(f: &HFunction, g: &HFunction) -> Result<OpReport> {
    ring_op(Op::Plus, Definition::Completion, f, g, &[])
}

pub fn otimes_def1(f: &HFunction, g: &HFunction) -> Result<OpReport> {
    ring_op(Op::Times, Definition::Completion, f, g, &[])
}

pub fn oplus_def2(f: &HFunction, g: &HFunction) -> Result<OpReport> {
    ring_op(Op::Plus, Definition::Restriction, f, g, &[])
}

pub fn otimes_def2(f: &HFunction, g: &HFunction) -> Result<OpReport> {
    ring_op(Op::Times, Definition::Restriction, f, g, &[])
}

/// `x -> [-hi(x), -lo(x)]`, the additive inverse in the ring.
pub fn additive_inverse(f: &HFunction) -> Result<HFunction> {
    require_h_continuous(f, "operand")?;
    Ok(f.negate())
}

/// An arithmetic expression over named operands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprTree {
    Leaf(String),
    Plus(Box<ExprTree>, Box<ExprTree>),
    Times(Box<ExprTree>, Box<ExprTree>),
}

/// How [`eval_expr`] combines operands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    Pointwise,
    Ring(Definition),
}

impl ExprTree {
    pub fn leaf(name: &str) -> Self {
        ExprTree::Leaf(name.to_string())
    }

    pub fn plus(a: ExprTree, b: ExprTree) -> Self {
        ExprTree::Plus(Box::new(a), Box::new(b))
    }

    pub fn times(a: ExprTree, b: ExprTree) -> Self {
        ExprTree::Times(Box::new(a), Box::new(b))
    }

    /// Parses names, `+`, `*` and parentheses; `*` binds tighter.
    pub fn parse(text: &str) -> Result<ExprTree> {
        let mut p = TreeParser { src: text.as_bytes(), pos: 0 };
        let t = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse { pos: p.pos, msg: "trailing input".into() });
        }
        Ok(t)
    }

    pub fn leaves(&self) -> Vec<&str> {
        match self {
            ExprTree::Leaf(n) => vec![n.as_str()],
            ExprTree::Plus(a, b) | ExprTree::Times(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprTree::Plus(..) => 1,
            ExprTree::Times(..) => 2,
            ExprTree::Leaf(_) => 3,
        }
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, op, prec) = match self {
            ExprTree::Leaf(n) => return f.write_str(n),
            ExprTree::Plus(a, b) => (a, b, " + ", 1),
            ExprTree::Times(a, b) => (a, b, "*", 2),
        };
        let side = |f: &mut fmt::Formatter<'_>, t: &ExprTree, parens: bool| {
            if parens {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        };
        side(f, a, a.precedence() < prec)?;
        f.write_str(op)?;
        side(f, b, b.precedence() <= prec)
    }
}

struct TreeParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TreeParser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<ExprTree> {
        let mut t = self.product()?;
        while self.eat(b'+') {
            t = ExprTree::plus(t, self.product()?);
        }
        Ok(t)
    }

    fn product(&mut self) -> Result<ExprTree> {
        let mut t = self.atom()?;
        while self.eat(b'*') {
            t = ExprTree::times(t, self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<ExprTree> {
        if self.eat(b'(') {
            let t = self.sum()?;
            if !self.eat(b')') {
                return Err(Error::Parse { pos: self.pos, msg: "expected `)`".into() });
            }
            return Ok(t);
        }
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.src[start].is_ascii_digit() {
            return Err(Error::Parse { pos: start, msg: "expected a function name".into() });
        }
        Ok(ExprTree::Leaf(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()))
    }
}

/// Evaluates `tree` with the file's bindings. Envelope declarations in the
/// file apply to the subexpression with the same canonical text.
pub fn eval_expr(tree: &ExprTree, file: &FunctionFile, mode: EvalMode) -> Result<HFunction> {
    for name in tree.leaves() {
        file.get(name)?;
    }
    eval_inner(tree, file, mode)
}

fn eval_inner(tree: &ExprTree, file: &FunctionFile, mode: EvalMode) -> Result<HFunction> {
    let (a, b, op) = match tree {
        ExprTree::Leaf(n) => {
            let f = file.get(n)?;
            if let EvalMode::Ring(_) = mode {
                require_h_continuous(f, n)?;
            }
            return Ok(f.clone());
        }
        ExprTree::Plus(a, b) => (a, b, Op::Plus),
        ExprTree::Times(a, b) => (a, b, Op::Times),
    };
    let key = tree.to_string();
    let decls: Vec<EnvelopeDecl> = file.envelopes.iter().filter(|d| d.expr == key).cloned().collect();
    let (fa, fb) = (eval_inner(a, file, mode)?, eval_inner(b, file, mode)?);
    match mode {
        EvalMode::Pointwise => declare(op.pointwise(&fa, &fb)?, &decls),
        EvalMode::Ring(def) => Ok(ring_op(op, def, &fa, &fb, &decls)?.result),
    }
}

/// Checks that completing the pointwise value of `tree` from the common
/// point-valued set of its operands gives the ring value.
pub fn expression_extension_holds(tree: &ExprTree, file: &FunctionFile) -> Result<bool> {
    let ring = eval_expr(tree, file, EvalMode::Ring(Definition::Completion))?;
    let pointwise = eval_expr(tree, file, EvalMode::Pointwise)?;
    let operands: Vec<&HFunction> = tree.leaves().into_iter().map(|n| file.get(n)).collect::<Result<_>>()?;
    let d = common_point_domain(&operands);
    let extended = graph_completion(&pointwise, &d)?;
    Ok(extended.equals(&ring, &EqConfig::default()))
}

/// Outcome for one ring axiom over a suite.
#[derive(Clone, Debug)]
pub struct AxiomResult {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl AxiomResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug)]
pub struct RingReport {
    pub cases: usize,
    pub axioms: Vec<AxiomResult>,
}

impl RingReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(AxiomResult::passed)
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct RingCheckConfig {
    pub suite: SuiteConfig,
    /// Replace ⊕ and ⊗ by the uncompleted pointwise operations.
    pub mutant: bool,
    /// Also compare the completion and restriction definitions.
    pub compare_definitions: bool,
}

impl Default for RingCheckConfig {
    fn default() -> Self {
        RingCheckConfig { suite: SuiteConfig::default(), mutant: false, compare_definitions: false }
    }
}

struct Ring {
    mutant: bool,
}

impl Ring {
    fn op(&self, op: Op, f: &HFunction, g: &HFunction) -> Result<HFunction> {
        if self.mutant {
            Ok(op.pointwise(f, g)?.normalize())
        } else {
            Ok(ring_op(op, Definition::Completion, f, g, &[])?.result)
        }
    }

    fn add(&self, f: &HFunction, g: &HFunction) -> Result<HFunction> {
        self.op(Op::Plus, f, g)
    }

    fn mul(&self, f: &HFunction, g: &HFunction) -> Result<HFunction> {
        self.op(Op::Times, f, g)
    }
}

type AxiomCheck = fn(&Ring, &HFunction, &HFunction, &HFunction) -> Result<(HFunction, HFunction)>;

fn axiom_table(compare_definitions: bool) -> Vec<(&'static str, AxiomCheck)> {
    let mut table: Vec<(&'static str, AxiomCheck)> = vec![
        ("add_commutative", |r, f, g, _| Ok((r.add(f, g)?, r.add(g, f)?))),
        ("mul_commutative", |r, f, g, _| Ok((r.mul(f, g)?, r.mul(g, f)?))),
        ("add_associative", |r, f, g, h| Ok((r.add(&r.add(f, g)?, h)?, r.add(f, &r.add(g, h)?)?))),
        ("mul_associative", |r, f, g, h| Ok((r.mul(&r.mul(f, g)?, h)?, r.mul(f, &r.mul(g, h)?)?))),
        ("distributive", |r, f, g, h| Ok((r.mul(&r.add(f, g)?, h)?, r.add(&r.mul(f, h)?, &r.mul(g, h)?)?))),
        ("add_identity", |r, f, _, _| {
            let zero = HFunction::constant(f.domain().clone(), Scalar::zero());
            Ok((r.add(f, &zero)?, f.clone()))
        }),
        ("mul_identity", |r, f, _, _| {
            let one = HFunction::constant(f.domain().clone(), Scalar::one());
            Ok((r.mul(f, &one)?, f.clone()))
        }),
        ("additive_inverse", |r, f, _, _| {
            let zero = HFunction::constant(f.domain().clone(), Scalar::zero());
            Ok((r.add(f, &additive_inverse(f)?)?, zero))
        }),
    ];
    if compare_definitions {
        table.push(("def1_eq_def2_plus", |_, f, g, _| Ok((oplus_def1(f, g)?.result, oplus_def2(f, g)?.result))));
        table.push(("def1_eq_def2_times", |_, f, g, _| Ok((otimes_def1(f, g)?.result, otimes_def2(f, g)?.result))));
    }
    table
}

/// Checks the commutative ring axioms on triples `(f_i, f_{i+1}, f_{i+2})`
/// drawn cyclically from `functions`.
pub fn verify_ring_on(functions: &[HFunction], mutant: bool, compare_definitions: bool) -> RingReport {
    let ring = Ring { mutant };
    let n = functions.len();
    let table = axiom_table(compare_definitions);
    let outcomes: Vec<Vec<Option<String>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (f, g, h) = (&functions[i], &functions[(i + 1) % n], &functions[(i + 2) % n]);
            table
                .iter()
                .map(|(_, check)| match check(&ring, f, g, h) {
                    Ok((lhs, rhs)) => lhs
                        .first_difference(&rhs, &EqConfig::exact())
                        .map(|d| format!("case {i}: {d}")),
                    Err(e) => Some(format!("case {i}: {e}")),
                })
                .collect()
        })
        .collect();
    let axioms = table
        .iter()
        .enumerate()
        .map(|(j, (name, _))| {
            let fails: Vec<&String> = outcomes.iter().filter_map(|o| o[j].as_ref()).collect();
            AxiomResult { name, checked: n, failures: fails.len(), counterexample: fails.first().map(|s| s.to_string()) }
        })
        .collect();
    RingReport { cases: n, axioms }
}

/// [`verify_ring_on`] over a freshly generated random suite.
pub fn verify_ring(cfg: &RingCheckConfig) -> RingReport {
    verify_ring_on(&random_suite(&cfg.suite), cfg.mutant, cfg.compare_definitions)
}
