use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple closed curve on a complexity-one surface, as a primitive integer
/// vector up to sign. `0/1` is the Fenchel–Nielsen curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Slope {
    pub const FN: Slope = Slope { p: 0, q: 1 };
    pub const DUAL: Slope = Slope { p: 1, q: 0 };
    pub const DIAGONAL: Slope = Slope { p: 1, q: 1 };

    /// Normalizes the sign; rejects non-primitive vectors.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if gcd(p as i128, q as i128) != 1 {
            return Err(Error::InvalidInput(format!("{p}/{q} is not a primitive slope")));
        }
        Ok(Self::from_vec_unchecked(p as i128, q as i128))
    }

    pub(crate) fn from_vec_unchecked(p: i128, q: i128) -> Self {
        let (p, q) = if q < 0 || (q == 0 && p < 0) { (-p, -q) } else { (p, q) };
        Slope { p: p as i64, q: q as i64 }
    }

    pub(crate) fn vec(self) -> (i128, i128) {
        (self.p as i128, self.q as i128)
    }

    pub fn height(self) -> i64 {
        self.p.abs().max(self.q.abs())
    }

    /// Key used for deterministic tie-breaking: `(|p|+|q|, p, q)`.
    pub fn tie_key(self) -> (i64, i64, i64) {
        (self.p.abs() + self.q.abs(), self.p, self.q)
    }

    pub fn intersection(self, other: Slope) -> i64 {
        (self.p * other.q - self.q * other.p).abs()
    }

    /// Image under the positive Dehn twist about the Fenchel–Nielsen curve.
    pub fn dehn_twist(self, n: i64) -> Slope {
        Slope::from_vec_unchecked(self.p as i128, self.q as i128 + n as i128 * self.p as i128)
    }

    /// Mod-2 class; on the four-punctured sphere the pure mapping class group
    /// preserves it.
    pub fn parity(self) -> (i64, i64) {
        (self.p.rem_euclid(2), self.q.rem_euclid(2))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        self.tie_key().cmp(&other.tie_key())
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// A positive real multiple of a slope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedSlope {
    pub weight: f64,
    pub slope: Slope,
}

pub fn intersection_number(c1: WeightedSlope, c2: WeightedSlope) -> f64 {
    c1.weight * c2.weight * c1.slope.intersection(c2.slope) as f64
}

/// Integer matrix of determinant 1 acting on slope vectors (columns).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl Mat2 {
    pub const ID: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };

    pub fn det(&self) -> i128 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, v: (i128, i128)) -> (i128, i128) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    pub fn apply_slope(&self, s: Slope) -> Slope {
        let (p, q) = self.apply(s.vec());
        Slope::from_vec_unchecked(p, q)
    }

    pub fn inverse(&self) -> Mat2 {
        debug_assert_eq!(self.det(), 1);
        Mat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Some determinant-one matrix whose second column is `s`, so that it
    /// carries the Fenchel–Nielsen curve `0/1` to `s`.
    pub fn sending_fn_to(s: Slope) -> Mat2 {
        let (p, q) = s.vec();
        // Need r*q - t*p = 1.
        let (g, x, y) = ext_gcd(q, p);
        debug_assert_eq!(g, 1);
        Mat2 { a: x, b: p, c: -y, d: q }
    }
}

/// Returns (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization() {
        assert_eq!(Slope::new(-2, -3).unwrap(), Slope { p: 2, q: 3 });
        assert_eq!(Slope::new(-1, 0).unwrap(), Slope::DUAL);
        assert!(Slope::new(2, 4).is_err());
        assert!(Slope::new(0, 0).is_err());
    }

    #[test]
    fn intersections() {
        let w = |weight, p, q| WeightedSlope { weight, slope: Slope::new(p, q).unwrap() };
        assert_eq!(intersection_number(w(1.0, 0, 1), w(1.0, 1, 0)), 1.0);
        assert_eq!(intersection_number(w(1.0, 3, 5), w(1.0, 3, 5)), 0.0);
        assert_eq!(intersection_number(w(2.0, 1, 2), w(1.0, 3, 5)), 2.0);
    }

    #[test]
    fn dehn_twist_fixes_fn_curve() {
        assert_eq!(Slope::FN.dehn_twist(5), Slope::FN);
        assert_eq!(Slope::DUAL.dehn_twist(1), Slope::DIAGONAL);
    }

    proptest! {
        #[test]
        fn chart_matrix_sends_fn_curve(p in -500i64..500, q in 0i64..500) {
            prop_assume!(gcd(p as i128, q as i128) == 1);
            let s = Slope::new(p, q).unwrap();
            let g = Mat2::sending_fn_to(s);
            prop_assert_eq!(g.det(), 1);
            prop_assert_eq!(g.apply_slope(Slope::FN), s);
            prop_assert_eq!(g.inverse().apply_slope(s), Slope::FN);
        }

        #[test]
        fn intersection_is_twist_invariant(p in -50i64..50, q in 1i64..50, r in -50i64..50, s in 1i64..50, n in -5i64..5) {
            prop_assume!(gcd(p as i128, q as i128) == 1 && gcd(r as i128, s as i128) == 1);
            let a = Slope::new(p, q).unwrap();
            let b = Slope::new(r, s).unwrap();
            prop_assert_eq!(a.intersection(b), a.dehn_twist(n).intersection(b.dehn_twist(n)));
        }
    }
}
