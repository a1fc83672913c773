//! Real scalars carried either as exact rationals or as binary floats.
//!
//! Arithmetic between two exact values stays exact. As soon as a float
//! enters (or a transcendental function is applied) the result is a float.
//! No outward rounding is performed in float mode.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default comparison tolerance in float mode.
pub const FLOAT_TOL: f64 = 1e-9;

/// Global engine setting for how literals and sampled values are carried.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Rational,
    Float,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" | "exact" => Ok(Mode::Rational),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode `{other}` (expected rational or float)")),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(num.into(), den.into()))
    }

    /// Wraps a float, rejecting non-finite values.
    pub fn float(x: f64) -> Option<Self> {
        x.is_finite().then_some(Scalar::Float(x))
    }

    /// Converts a float into the given mode. In rational mode the shortest
    /// decimal that round-trips to `x` is taken as the exact value, so `0.1`
    /// becomes `1/10` rather than the binary expansion.
    pub fn from_f64(x: f64, mode: Mode) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        match mode {
            Mode::Float => Some(Scalar::Float(x)),
            Mode::Rational => parse_decimal(&format!("{x}")).map(Scalar::Exact),
        }
    }

    /// Parses a decimal literal (`-1.25`, `3e-2`) or a fraction (`-1/3`).
    pub fn parse(text: &str, mode: Mode) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num = BigInt::from_str(num.trim()).ok()?;
            let den = BigInt::from_str(den.trim()).ok()?;
            if den.is_zero() {
                return None;
            }
            let r = BigRational::new(num, den);
            return Some(match mode {
                Mode::Rational => Scalar::Exact(r),
                Mode::Float => Scalar::Float(r.to_f64()?),
            });
        }
        match mode {
            Mode::Rational => parse_decimal(text).map(Scalar::Exact),
            Mode::Float => text.parse::<f64>().ok().and_then(Scalar::float),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    /// Re-expresses the value in `mode`. Floats converted to rational mode
    /// keep their exact binary value.
    pub fn in_mode(&self, mode: Mode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(r), Mode::Float) => Scalar::Float(r.to_f64().unwrap_or(0.0)),
            (Scalar::Float(x), Mode::Rational) => {
                Scalar::Exact(BigRational::from_float(*x).unwrap_or_else(BigRational::zero))
            }
            _ => self.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        if other.is_zero() {
            return None;
        }
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(Scalar::Exact(a / b)),
            _ => Scalar::float(self.to_f64() / other.to_f64()),
        }
    }

    /// Square root; stays exact for squares of rationals.
    pub fn sqrt(&self) -> Option<Scalar> {
        if *self < Scalar::zero() {
            return None;
        }
        if let Scalar::Exact(r) = self {
            let (n, d) = (r.numer(), r.denom());
            let (sn, sd) = (n.sqrt(), d.sqrt());
            if &(&sn * &sn) == n && &(&sd * &sd) == d {
                return Some(Scalar::Exact(BigRational::new(sn, sd)));
            }
        }
        Scalar::float(self.to_f64().sqrt())
    }

    pub fn sin(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        Scalar::float(self.to_f64().sin())
    }

    pub fn cos(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::one());
        }
        Scalar::float(self.to_f64().cos())
    }

    /// Equality up to `tol`; exact comparison when both sides are exact.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= tol,
        }
    }

    /// `self <= other + tol` (exact when both sides are exact).
    pub fn approx_le(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a <= b,
            _ => self.to_f64() <= other.to_f64() + tol,
        }
    }

    /// Decimal text when the value has a terminating expansion, `p/q`
    /// otherwise; floats print their shortest round-trip representation.
    pub fn to_text(&self) -> String {
        match self {
            Scalar::Float(x) => format_float(*x),
            Scalar::Exact(r) => exact_text(r),
        }
    }

    /// True when `to_text` yields a plain decimal (usable as a JSON number).
    pub fn is_decimal(&self) -> bool {
        match self {
            Scalar::Float(_) => true,
            Scalar::Exact(r) => terminating_scale(r.denom()).is_some(),
        }
    }
}

fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x}")
}

/// Number of decimal digits needed if `den` has only factors 2 and 5.
fn terminating_scale(den: &BigInt) -> Option<u32> {
    let mut d = den.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    d.is_one().then_some(twos.max(fives))
}

fn exact_text(r: &BigRational) -> String {
    let Some(scale) = terminating_scale(r.denom()) else {
        return format!("{}/{}", r.numer(), r.denom());
    };
    if scale == 0 {
        return r.numer().to_string();
    }
    let factor = BigInt::from(10).pow(scale);
    let scaled = (r.numer() * &factor) / r.denom();
    let neg = scaled.sign() == Sign::Minus;
    let digits = scaled.abs().to_string();
    let width = scale as usize + 1;
    let digits = format!("{digits:0>width$}");
    let (int_part, frac_part) = digits.split_at(digits.len() - scale as usize);
    let frac_part = frac_part.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if neg { -value } else { value })
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.total_cmp(b),
            (Scalar::Exact(a), Scalar::Float(b)) => cmp_exact_float(a, *b),
            (Scalar::Float(a), Scalar::Exact(b)) => cmp_exact_float(b, *a).reverse(),
        }
    }
}

fn cmp_exact_float(a: &BigRational, b: f64) -> Ordering {
    match BigRational::from_float(b) {
        Some(bq) => a.cmp(&bq),
        None => Ordering::Equal,
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}
