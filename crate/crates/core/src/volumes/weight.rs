use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use super::poly::{rat_from_f64, GradedPoly};
use crate::error::{Error, Result};

/// One axis-aligned cell of a piecewise-polynomial weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// π-free polynomial in the normalized lengths.
    pub poly: GradedPoly,
}

impl Cell {
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| *v >= *l && *v <= *h)
    }

    pub(crate) fn lo_rat(&self) -> Vec<BigRational> {
        self.lo.iter().map(|&v| rat_from_f64(v)).collect()
    }

    pub(crate) fn hi_rat(&self) -> Vec<BigRational> {
        self.hi.iter().map(|&v| rat_from_f64(v)).collect()
    }
}

pub type Callable = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A bounded, non-negative weight `f` on normalized lengths.
#[derive(Clone)]
pub enum WeightFunction {
    /// Non-overlapping cells; zero outside them. Integrated exactly.
    Piecewise(Vec<Cell>),
    /// Arbitrary function with a bounding box for its support and an upper
    /// bound for its values. Integrated by adaptive quadrature.
    Callable { f: Callable, lo: Vec<f64>, hi: Vec<f64>, sup: f64 },
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::Piecewise(c) => f.debug_tuple("Piecewise").field(c).finish(),
            WeightFunction::Callable { lo, hi, sup, .. } => {
                f.debug_struct("Callable").field("lo", lo).field("hi", hi).field("sup", sup).finish()
            }
        }
    }
}

impl WeightFunction {
    /// Indicator of the box `∏ [0, aᵢ]`.
    pub fn box_indicator(a: &[f64]) -> Self {
        WeightFunction::Piecewise(vec![Cell { lo: vec![0.0; a.len()], hi: a.to_vec(), poly: GradedPoly::one(a.len()) }])
    }

    /// Constant `c` on `∏ [loᵢ, hiᵢ]`.
    pub fn constant_on(c: f64, lo: &[f64], hi: &[f64]) -> Self {
        let k = lo.len();
        WeightFunction::Piecewise(vec![Cell {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            poly: GradedPoly::constant(k, rat_from_f64(c), 0),
        }])
    }

    pub fn zero(k: usize) -> Self {
        WeightFunction::Piecewise(vec![Cell { lo: vec![0.0; k], hi: vec![1.0; k], poly: GradedPoly::zero(k) }])
    }

    pub fn callable(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, lo: &[f64], hi: &[f64], sup: f64) -> Self {
        WeightFunction::Callable { f: Arc::new(f), lo: lo.to_vec(), hi: hi.to_vec(), sup }
    }

    pub fn dim(&self) -> usize {
        match self {
            WeightFunction::Piecewise(c) => c.first().map_or(0, |c| c.lo.len()),
            WeightFunction::Callable { lo, .. } => lo.len(),
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.dim() != k {
            return Err(Error::InvalidInput(format!("weight has {} variables, expected {k}", self.dim())));
        }
        match self {
            WeightFunction::Piecewise(cells) => {
                for c in cells {
                    if c.lo.len() != k || c.hi.len() != k || c.poly.nvars() != k {
                        return Err(Error::InvalidInput("cell dimension mismatch".into()));
                    }
                    if c.lo.iter().zip(&c.hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h)) {
                        return Err(Error::InvalidInput("cell bounds must be finite and ordered".into()));
                    }
                    if c.poly.terms().any(|(_, m, _)| m != 0) {
                        return Err(Error::InvalidInput("weight polynomials must be free of π".into()));
                    }
                }
            }
            WeightFunction::Callable { lo, hi, sup, .. } => {
                if lo.iter().zip(hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h)) || !(*sup >= 0.0) {
                    return Err(Error::InvalidInput("callable weight needs a finite support box".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            WeightFunction::Piecewise(cells) => cells
                .iter()
                .find(|c| c.contains(x))
                .map_or(0.0, |c| c.poly.to_fast().eval(x)),
            WeightFunction::Callable { f, lo, hi, .. } => {
                let inside = x.iter().zip(lo).zip(hi).all(|((v, l), h)| *v >= *l && *v <= *h);
                if inside {
                    f(x)
                } else {
                    0.0
                }
            }
        }
    }

    /// Bounding box of the support.
    pub fn support(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            WeightFunction::Piecewise(cells) => {
                let k = self.dim();
                let mut lo = vec![f64::INFINITY; k];
                let mut hi = vec![f64::NEG_INFINITY; k];
                for c in cells {
                    for i in 0..k {
                        lo[i] = lo[i].min(c.lo[i]);
                        hi[i] = hi[i].max(c.hi[i]);
                    }
                }
                (lo, hi)
            }
            WeightFunction::Callable { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }

    /// Upper bound on `f`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            WeightFunction::Piecewise(cells) => cells
                .iter()
                .map(|c| {
                    let h: Vec<f64> = c.lo.iter().zip(&c.hi).map(|(l, h)| l.abs().max(h.abs())).collect();
                    c.poly.to_fast().bound_on_box(&h)
                })
                .fold(0.0, f64::max),
            WeightFunction::Callable { sup, .. } => *sup,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_indicator_values() {
        let f = WeightFunction::box_indicator(&[2.0]);
        assert_eq!(f.eval(&[1.0]), 1.0);
        assert_eq!(f.eval(&[2.5]), 0.0);
        assert_eq!(f.sup_bound(), 1.0);
    }

    #[test]
    fn validation() {
        assert!(WeightFunction::box_indicator(&[1.0, 2.0]).validate(2).is_ok());
        assert!(WeightFunction::box_indicator(&[1.0]).validate(2).is_err());
        assert!(WeightFunction::callable(|_| 1.0, &[0.0], &[f64::INFINITY], 1.0).validate(1).is_err());
    }
}
