//! Symbolic piecewise representation of interval-valued functions.

mod expr;
mod function;
mod parse;
mod poly;

pub use expr::{Expr, ExprKind, Func, PieceExpr};
pub use function::{
    align, common_point_domain, is_h_continuous, is_s_continuous, pointwise_add, pointwise_mul,
    validate_envelopes, Domain, EndEnvelope, EnvelopeCheck, EnvelopeReport, EqConfig, HFunction, Node,
    Piece, Provenance, Side, Support,
};
pub(crate) use function::{h_continuity_violation, random_points_in};
pub use parse::{parse_constant, parse_piece};
pub use poly::Poly;
