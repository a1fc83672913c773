//! Seeded random piecewise-linear functions on `(-1, 1)`.
//!
//! Nodes sit at multiples of 1/16; piece intercepts are multiples of 1/4 in
//! `[-2, 2]` and slopes multiples of 1/2 in `[-3, 3]`, so every value is an
//! exact dyadic rational.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::interval::Interval;
use crate::piecewise::{Domain, HFunction, Node, Piece, Poly, PieceExpr};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub cases: usize,
    pub seed: u64,
    pub max_nodes: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { cases: 200, seed: 2024, max_nodes: 4 }
    }
}

pub fn unit_domain() -> Domain {
    Domain::open(Scalar::int(-1), Scalar::one()).expect("(-1, 1) is non-empty")
}

fn grid_value(rng: &mut impl Rng, steps: i64, den: i64) -> Scalar {
    Scalar::ratio(rng.gen_range(-steps..=steps), den)
}

fn random_line(rng: &mut impl Rng) -> PieceExpr {
    let c = grid_value(rng, 8, 4);
    let s = grid_value(rng, 6, 2);
    PieceExpr::from_poly(&Poly::linear(c, s))
}

fn random_nodes(rng: &mut impl Rng, max_nodes: usize) -> Vec<Scalar> {
    let count = rng.gen_range(0..=max_nodes);
    let mut xs: Vec<Scalar> = sample(rng, 31, count).into_iter().map(|j| Scalar::ratio(j as i64 - 15, 16)).collect();
    xs.sort();
    xs
}

fn assemble(xs: Vec<Scalar>, pieces: Vec<Piece>, widen: impl FnMut(Interval) -> Interval) -> HFunction {
    let mut widen = widen;
    let placeholder: Vec<Node> = xs.into_iter().map(|x| Node { x, value: Interval::point(Scalar::zero()) }).collect();
    let f = HFunction::from_trusted_parts(unit_domain(), placeholder, pieces).expect("generated pieces are valid");
    let nodes: Vec<Node> = (0..f.nodes().len())
        .map(|k| Node { x: f.nodes()[k].x.clone(), value: widen(f.punctured_completion(k)) })
        .collect();
    HFunction::from_parts_unchecked(f.domain().clone(), nodes, f.pieces().to_vec())
}

/// A random H-continuous piecewise-linear function.
pub fn random_h_function(rng: &mut impl Rng, max_nodes: usize) -> HFunction {
    let xs = random_nodes(rng, max_nodes);
    let pieces = (0..=xs.len()).map(|_| Piece::real(random_line(rng))).collect();
    assemble(xs, pieces, |v| v)
}

/// A random S-continuous piecewise-linear function: node values enlarge the
/// completion of the limits, and some pieces are interval valued.
pub fn random_s_function(rng: &mut impl Rng, max_nodes: usize) -> HFunction {
    let xs = random_nodes(rng, max_nodes);
    let pieces: Vec<Piece> = (0..=xs.len())
        .map(|_| {
            let lower = random_line(rng);
            if rng.gen_bool(0.3) {
                let w = Scalar::ratio(rng.gen_range(1..=4), 4);
                let upper = lower.add(&PieceExpr::constant(w));
                Piece { lower, upper, left: None, right: None }
            } else {
                Piece::real(lower)
            }
        })
        .collect();
    let mut extra = |v: Interval| {
        let lo = v.lo() - &Scalar::ratio(rng.gen_range(0..=2), 4);
        let hi = v.hi() + &Scalar::ratio(rng.gen_range(0..=2), 4);
        Interval::hull_of(lo, hi)
    };
    assemble(xs, pieces, &mut extra)
}

/// `cfg.cases` H-continuous functions, deterministic in `cfg.seed`.
pub fn random_suite(cfg: &SuiteConfig) -> Vec<HFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.cases).map(|_| random_h_function(&mut rng, cfg.max_nodes)).collect()
}

/// `cfg.cases` S-continuous functions, deterministic in `cfg.seed`.
pub fn random_s_suite(cfg: &SuiteConfig) -> Vec<HFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5c0f);
    (0..cfg.cases).map(|_| random_s_function(&mut rng, cfg.max_nodes)).collect()
}

/// Pairs of consecutive suite functions, `(f_i, f_{i+1})`.
pub fn suite_pairs(functions: &[HFunction], count: usize) -> Vec<(HFunction, HFunction)> {
    let n = functions.len();
    (0..count.min(n)).map(|i| (functions[i].clone(), functions[(i + 1) % n].clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::{is_h_continuous, is_s_continuous, EqConfig};

    #[test]
    fn deterministic_in_seed() {
        let cfg = SuiteConfig { cases: 10, ..SuiteConfig::default() };
        let (a, b) = (random_suite(&cfg), random_suite(&cfg));
        assert!(a.iter().zip(&b).all(|(f, g)| f.equals(g, &EqConfig::exact())));
    }

    #[test]
    fn generated_functions_have_the_advertised_class() {
        let cfg = SuiteConfig { cases: 50, ..SuiteConfig::default() };
        for f in random_suite(&cfg) {
            assert!(is_h_continuous(&f) && f.is_piecewise_linear() && f.nodes().len() <= 4);
        }
        for f in random_s_suite(&cfg) {
            assert!(is_s_continuous(&f));
        }
    }
}
