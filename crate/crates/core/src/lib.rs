//! The commutative ring of Hausdorff continuous interval-valued functions on
//! an open interval of the real line.
//!
//! Functions are represented symbolically ([`piecewise::HFunction`]): finitely
//! many nodes carrying interval values, closed-form pieces in between, and
//! one-sided limit envelopes at every piece end. On top of this sit the Baire
//! operators and graph completion ([`baire`]), the ring operations in their
//! three equivalent formulations ([`algebra`], [`order`]) and a seeded
//! generator of random piecewise-linear test functions ([`suite`]).

pub mod algebra;
pub mod baire;
pub mod catalog;
pub mod convergence;
pub mod error;
pub mod interval;
pub mod json;
pub mod order;
pub mod piecewise;
pub mod scalar;
pub mod suite;

pub use error::{Error, Result};
pub use interval::Interval;
pub use piecewise::{Domain, HFunction, PieceExpr};
pub use scalar::{Mode, Scalar};
