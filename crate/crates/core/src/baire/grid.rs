//! Discrete Baire operators on uniform samples, using a one-cell stencil.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::piecewise::HFunction;
use crate::scalar::Scalar;

/// Samples `values[i]` at `x0 + i*h`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub x0: Scalar,
    pub h: Scalar,
    pub values: Vec<Interval>,
}

impl GridFunction {
    pub fn new(x0: Scalar, h: Scalar, values: Vec<Interval>) -> Result<Self> {
        if h <= Scalar::zero() {
            return Err(Error::Format(format!("grid step must be positive, got {h}")));
        }
        Ok(GridFunction { x0, h, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> Scalar {
        &self.x0 + &(&Scalar::int(i as i64) * &self.h)
    }

    /// CSV with header `x,lo,hi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,lo,hi\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.x(i).to_text(), v.lo().to_text(), v.hi().to_text());
        }
        out
    }

    fn stencil(&self, pick: impl Fn(&[Interval]) -> Scalar) -> GridFunction {
        let n = self.values.len();
        let values = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(n - 1);
                Interval::point(pick(&self.values[lo..=hi]))
            })
            .collect();
        GridFunction { x0: self.x0.clone(), h: self.h.clone(), values }
    }
}

/// `values[i] = f(x0 + i*h)`.
pub fn grid_sample(f: &HFunction, x0: &Scalar, h: &Scalar, n: usize) -> Result<GridFunction> {
    let mut g = GridFunction::new(x0.clone(), h.clone(), Vec::with_capacity(n))?;
    for i in 0..n {
        let v = f.eval_at(&g.x(i))?;
        g.values.push(v);
    }
    Ok(g)
}

/// Minimum of the lower ends over `{i-1, i, i+1}`, clamped at the ends.
pub fn grid_lower(g: &GridFunction) -> GridFunction {
    g.stencil(|w| w.iter().map(|v| v.lo().clone()).min().expect("non-empty stencil"))
}

/// Maximum of the upper ends over `{i-1, i, i+1}`, clamped at the ends.
pub fn grid_upper(g: &GridFunction) -> GridFunction {
    g.stencil(|w| w.iter().map(|v| v.hi().clone()).max().expect("non-empty stencil"))
}

pub fn grid_completion(g: &GridFunction) -> GridFunction {
    let (lo, hi) = (grid_lower(g), grid_upper(g));
    let values = lo
        .values
        .into_iter()
        .zip(hi.values)
        .map(|(a, b)| Interval::hull_of(a.lo().clone(), b.hi().clone()))
        .collect();
    GridFunction { x0: g.x0.clone(), h: g.h.clone(), values }
}

/// `grid_completion ∘ grid_lower ∘ grid_upper`.
pub fn grid_fis(g: &GridFunction) -> GridFunction {
    grid_completion(&grid_lower(&grid_upper(g)))
}
