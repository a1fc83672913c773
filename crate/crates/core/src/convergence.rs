//! Measurements of how the approximate engines approach the exact one: the
//! grid operators against exact completion, and order limits at finite
//! depth against the completion definition.

use crate::algebra::{ring_op, Definition, Op};
use crate::baire::{grid_fis, grid_sample};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::order::max_deviation;
use crate::piecewise::{HFunction, Side};
use crate::scalar::{Mode, Scalar, FLOAT_TOL};

/// Grid points closer than this many steps to a discontinuity are skipped.
pub const JUMP_MARGIN_STEPS: i64 = 3;

/// Nodes where a function is not continuous: proper-interval values, or
/// one-sided limits that differ from each other or from the value.
pub fn discontinuities(fs: &[&HFunction]) -> Vec<Scalar> {
    let mut out = Vec::new();
    for f in fs {
        for (k, node) in f.nodes().iter().enumerate() {
            let (l, r) = (f.node_envelope(k, Side::Left), f.node_envelope(k, Side::Right));
            let limits_agree = l.liminf.approx_eq(&r.liminf, FLOAT_TOL)
                && l.limsup.approx_eq(&r.limsup, FLOAT_TOL)
                && l.liminf.approx_eq(&l.limsup, FLOAT_TOL);
            let continuous = limits_agree && node.value.approx_eq(&Interval::point(l.liminf.clone()), FLOAT_TOL);
            if !continuous {
                out.push(node.x.clone());
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridRow {
    pub h: Scalar,
    pub max_error: f64,
    /// Number of grid points that counted as continuity points.
    pub points: usize,
}

/// Largest distance between the grid completion of `pointwise` and `exact`
/// over grid points of `(lo, hi)` at least [`JUMP_MARGIN_STEPS`] steps
/// away from every point of `jumps`.
pub fn grid_error(
    pointwise: &HFunction,
    exact: &HFunction,
    jumps: &[Scalar],
    window: (&Scalar, &Scalar),
    h: &Scalar,
) -> Result<GridRow> {
    let (lo, hi) = window;
    if *h <= Scalar::zero() {
        return Err(Error::Format(format!("grid step must be positive, got {h}")));
    }
    let span = (hi - lo).to_f64() / h.to_f64();
    let n = (span.ceil() as usize).saturating_sub(1);
    if n < 3 {
        return Err(Error::Format(format!("step {h} leaves fewer than three grid points")));
    }
    let x0 = lo + h;
    let grid = grid_fis(&grid_sample(pointwise, &x0, h, n)?);
    let margin = &Scalar::int(JUMP_MARGIN_STEPS) * h;
    let mut row = GridRow { h: h.clone(), max_error: 0.0, points: 0 };
    for (i, v) in grid.values.iter().enumerate() {
        let x = grid.x(i);
        if jumps.iter().any(|j| (&x - j).abs() <= margin) {
            continue;
        }
        row.points += 1;
        row.max_error = row.max_error.max(v.distance(&exact.eval_at(&x)?));
    }
    Ok(row)
}

/// [`grid_error`] for each step in `hs`.
pub fn grid_convergence(
    pointwise: &HFunction,
    exact: &HFunction,
    operands: &[&HFunction],
    window: (&Scalar, &Scalar),
    hs: &[Scalar],
) -> Result<Vec<GridRow>> {
    let mut all: Vec<&HFunction> = operands.to_vec();
    all.push(pointwise);
    all.push(exact);
    let jumps = discontinuities(&all);
    hs.iter().map(|h| grid_error(pointwise, exact, &jumps, window, h)).collect()
}

/// Ratios `e(h_{k+1}) / e(h_k)`; `None` where the coarser error is zero.
pub fn error_ratios(rows: &[GridRow]) -> Vec<Option<f64>> {
    rows.windows(2)
        .map(|w| (w[0].max_error > 0.0).then(|| w[1].max_error / w[0].max_error))
        .collect()
}

/// One sample of a def1/def3 comparison.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub x: Scalar,
    pub def1: Interval,
    pub def3: Interval,
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub op: Op,
    pub depth: u64,
    pub max_abs_deviation: f64,
    pub rows: Vec<ComparisonRow>,
}

/// `op` by the order-limit definition at `depth` against the completion
/// definition, over `samples` seeded points and all nodes.
pub fn compare_def1_def3(op: Op, f: &HFunction, g: &HFunction, depth: u64, samples: usize, seed: u64) -> Result<Comparison> {
    let d1 = ring_op(op, Definition::Completion, f, g, &[])?.result;
    let d3 = ring_op(op, Definition::OrderLimit { depth }, f, g, &[])?.result;
    let mut xs = f.domain().random_points(samples, seed, Mode::Rational);
    xs.extend(d1.node_xs());
    xs.extend(d3.node_xs());
    xs.sort();
    xs.dedup();
    let mut rows = Vec::with_capacity(xs.len());
    for x in xs {
        let (a, b) = (d1.eval_at(&x)?, d3.eval_at(&x)?);
        let deviation = a.distance(&b);
        rows.push(ComparisonRow { x, def1: a, def3: b, deviation });
    }
    let max_abs_deviation = max_deviation(&d1, &d3, 0, seed)?.max(rows.iter().map(|r| r.deviation).fold(0.0, f64::max));
    Ok(Comparison { op, depth, max_abs_deviation, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::oplus_def1;
    use crate::catalog;
    use crate::piecewise::pointwise_add;

    #[test]
    fn flat_step_pair_has_no_error_off_the_jump() {
        let (f, g) = (catalog::step_up(), catalog::step_down());
        let p = pointwise_add(&f, &g).unwrap();
        let exact = oplus_def1(&f, &g).unwrap().result;
        let hs: Vec<Scalar> = [10, 20, 40].iter().map(|d| Scalar::ratio(1, *d)).collect();
        let (lo, hi) = (Scalar::int(-1), Scalar::one());
        let rows = grid_convergence(&p, &exact, &[&f, &g], (&lo, &hi), &hs).unwrap();
        assert!(rows.iter().all(|r| r.max_error == 0.0 && r.points > 0));
        assert_eq!(discontinuities(&[&f, &g, &p]), vec![Scalar::zero()]);
    }

    #[test]
    fn sloped_pieces_converge_linearly() {
        let f = catalog::real_line_fn("2*x");
        let exact = oplus_def1(&f, &catalog::constant(0)).unwrap().result;
        let hs = [Scalar::ratio(1, 16), Scalar::ratio(1, 32)];
        let (lo, hi) = (Scalar::int(-1), Scalar::one());
        let rows = grid_convergence(&f, &exact, &[&f], (&lo, &hi), &hs).unwrap();
        assert_eq!(rows[0].max_error, 2.0 / 16.0);
        assert_eq!(error_ratios(&rows), vec![Some(0.5)]);
    }

    #[test]
    fn def3_agrees_on_the_step_pair() {
        let c = compare_def1_def3(Op::Plus, &catalog::step_up(), &catalog::step_down(), 128, 50, 7).unwrap();
        assert_eq!(c.max_abs_deviation, 0.0);
    }
}
