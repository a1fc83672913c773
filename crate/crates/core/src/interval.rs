//! Closed bounded real intervals with the outer (endpoint) operations.

use std::fmt;

use crate::error::Error;
use crate::scalar::Scalar;

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self, Error> {
        if lo > hi {
            return Err(Error::InvalidInterval { lo: lo.to_text(), hi: hi.to_text() });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Scalar) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    /// Smallest interval containing both values, in either order.
    pub fn hull_of(a: Scalar, b: Scalar) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn into_bounds(self) -> (Scalar, Scalar) {
        (self.lo, self.hi)
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    /// The interval order: both endpoints compare `<=`.
    pub fn leq(&self, other: &Interval) -> bool {
        self.lo <= other.lo && self.hi <= other.hi
    }

    pub fn subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn modulus(&self) -> Scalar {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn approx_eq(&self, other: &Interval, tol: f64) -> bool {
        self.lo.approx_eq(&other.lo, tol) && self.hi.approx_eq(&other.hi, tol)
    }

    pub fn approx_subset(&self, other: &Interval, tol: f64) -> bool {
        other.lo.approx_le(&self.lo, tol) && self.hi.approx_le(&other.hi, tol)
    }

    pub fn approx_leq(&self, other: &Interval, tol: f64) -> bool {
        self.lo.approx_le(&other.lo, tol) && self.hi.approx_le(&other.hi, tol)
    }

    /// Hausdorff distance between two intervals.
    pub fn distance(&self, other: &Interval) -> f64 {
        let dl = (self.lo.to_f64() - other.lo.to_f64()).abs();
        let dh = (self.hi.to_f64() - other.hi.to_f64()).abs();
        dl.max(dh)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
