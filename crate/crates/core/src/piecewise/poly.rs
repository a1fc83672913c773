use crate::scalar::Scalar;

/// Dense univariate polynomial, coefficients from the constant term up.
/// Trailing zero coefficients are trimmed, so the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly::new(vec![Scalar::zero(), Scalar::one()])
    }

    /// `intercept + slope * x`
    pub fn linear(intercept: Scalar, slope: Scalar) -> Self {
        Poly::new(vec![intercept, slope])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.coeffs.len() {
            0 => Some(Scalar::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }

    /// Coefficient-wise comparison; exact for exact coefficients.
    pub fn approx_eq(&self, other: &Poly, tol: f64) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|i| self.coeff(i).approx_eq(&other.coeff(i), tol))
    }
}
