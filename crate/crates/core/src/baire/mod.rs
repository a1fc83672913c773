//! Lower and upper Baire operators and graph completion on the piecewise
//! representation.
//!
//! Dense subsets are cofinite: `D = Ω \ excluded`. On a continuity piece the
//! operators return the lower (resp. upper) expression unchanged; at a node
//! they combine the one-sided envelopes with the node value itself when the
//! node belongs to `D`.

mod grid;

pub use grid::{grid_completion, grid_fis, grid_lower, grid_sample, grid_upper, GridFunction};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::piecewise::{HFunction, Node, Piece, Side};
use crate::scalar::Scalar;

/// `Ω` minus finitely many points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DenseSubset {
    excluded: Vec<Scalar>,
}

impl DenseSubset {
    pub fn all() -> Self {
        DenseSubset::default()
    }

    pub fn excluding(mut excluded: Vec<Scalar>) -> Self {
        excluded.sort();
        excluded.dedup();
        DenseSubset { excluded }
    }

    pub fn excluded(&self) -> &[Scalar] {
        &self.excluded
    }

    pub fn is_all(&self) -> bool {
        self.excluded.is_empty()
    }

    pub fn excludes(&self, x: &Scalar) -> bool {
        self.excluded.binary_search(x).is_ok()
    }

    pub fn union(&self, other: &DenseSubset) -> DenseSubset {
        DenseSubset::excluding(self.excluded.iter().chain(&other.excluded).cloned().collect())
    }

    /// True when `self ⊆ other`, i.e. `self` excludes everything `other` does.
    pub fn is_subset_of(&self, other: &DenseSubset) -> bool {
        other.excluded.iter().all(|x| self.excludes(x))
    }
}

fn prepare(f: &HFunction, d: &DenseSubset) -> Result<HFunction> {
    for x in d.excluded() {
        if !f.domain().contains(x) {
            return Err(Error::Domain(x.to_text()));
        }
    }
    f.refine(d.excluded())
}

/// `inf` over the punctured neighbourhood, plus the node value when `x ∈ D`.
fn node_lower(f: &HFunction, k: usize, d: &DenseSubset) -> Scalar {
    let l = f.node_envelope(k, Side::Left).liminf.clone();
    let r = f.node_envelope(k, Side::Right).liminf.clone();
    let node = &f.nodes()[k];
    let m = l.min(r);
    if d.excludes(&node.x) {
        m
    } else {
        m.min(node.value.lo().clone())
    }
}

fn node_upper(f: &HFunction, k: usize, d: &DenseSubset) -> Scalar {
    let l = f.node_envelope(k, Side::Left).limsup.clone();
    let r = f.node_envelope(k, Side::Right).limsup.clone();
    let node = &f.nodes()[k];
    let m = l.max(r);
    if d.excludes(&node.x) {
        m
    } else {
        m.max(node.value.hi().clone())
    }
}

fn one_branch(f: &HFunction, d: &DenseSubset, upper: bool) -> Result<HFunction> {
    let f = prepare(f, d)?;
    let nodes = (0..f.nodes().len())
        .map(|k| {
            let v = if upper { node_upper(&f, k, d) } else { node_lower(&f, k, d) };
            Node { x: f.nodes()[k].x.clone(), value: Interval::point(v) }
        })
        .collect();
    let pieces: Vec<Piece> = (0..f.pieces().len())
        .map(|i| {
            let (a, b) = f.piece_bounds(i);
            f.pieces()[i].branch(upper, a.as_ref(), b.as_ref())
        })
        .collect();
    Ok(HFunction::from_parts_unchecked(f.domain().clone(), nodes, pieces).normalize())
}

/// `I(D, Ω, f)`: the lower Baire operator. Real valued.
pub fn lower_baire(f: &HFunction, d: &DenseSubset) -> Result<HFunction> {
    one_branch(f, d, false)
}

/// `S(D, Ω, f)`: the upper Baire operator. Real valued.
pub fn upper_baire(f: &HFunction, d: &DenseSubset) -> Result<HFunction> {
    one_branch(f, d, true)
}

/// `F(D, Ω, f) = [I(D, Ω, f), S(D, Ω, f)]`.
pub fn graph_completion(f: &HFunction, d: &DenseSubset) -> Result<HFunction> {
    let f = prepare(f, d)?;
    let mut nodes = Vec::with_capacity(f.nodes().len());
    for k in 0..f.nodes().len() {
        let (lo, hi) = (node_lower(&f, k, d), node_upper(&f, k, d));
        let x = f.nodes()[k].x.clone();
        if lo > hi {
            return Err(Error::MalformedEnvelope { x: x.to_text(), liminf: lo.to_text(), limsup: hi.to_text() });
        }
        nodes.push(Node { x, value: Interval::new(lo, hi)? });
    }
    Ok(HFunction::from_parts_unchecked(f.domain().clone(), nodes, f.pieces().to_vec()).normalize())
}

/// `F(I(S(f)))` with `D = Ω`.
pub fn fis(f: &HFunction) -> Result<HFunction> {
    let all = DenseSubset::all();
    graph_completion(&lower_baire(&upper_baire(f, &all)?, &all)?, &all)
}

/// `F(S(I(f)))` with `D = Ω`.
pub fn fsi(f: &HFunction) -> Result<HFunction> {
    let all = DenseSubset::all();
    graph_completion(&upper_baire(&lower_baire(f, &all)?, &all)?, &all)
}
