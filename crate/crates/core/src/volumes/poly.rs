//! Exact polynomials with coefficients in `Q·π^{2m}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Monomial key: exponents of the length variables and the power `m` of `π²`.
pub type Mono = (Vec<u32>, u32);

/// `Σ q_α π^{2m_α} x^α` with exact rational `q_α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPoly {
    nvars: usize,
    terms: BTreeMap<Mono, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational value of a finite float.
pub fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl GradedPoly {
    pub fn zero(nvars: usize) -> Self {
        GradedPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, q: BigRational, pi_pow: u32) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], pi_pow, q);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one(), 0)
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, 0, BigRational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, u32, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, m, q) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, m, q);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, m: u32, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let key = (e, m);
        let sum = self.terms.get(&key).cloned().unwrap_or_else(BigRational::zero) + q;
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, u32, &BigRational)> {
        self.terms.iter().map(|((e, m), q)| (e, *m, q))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut p = self.clone();
        for ((e, m), q) in &o.terms {
            p.add_term(e.clone(), *m, q.clone());
        }
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut p = Self::zero(self.nvars);
        for ((e1, m1), q1) in &self.terms {
            for ((e2, m2), q2) in &o.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, m1 + m2, q1 * q2);
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(self.nvars), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut p = Self::zero(self.nvars);
        for ((e, m), q) in &self.terms {
            p.add_term(e.clone(), *m, q * s);
        }
        p
    }

    /// `P(s·x)`.
    pub fn scale_vars(&self, s: &BigRational) -> Self {
        let mut p = Self::zero(self.nvars);
        for ((e, m), q) in &self.terms {
            let d: u32 = e.iter().sum();
            p.add_term(e.clone(), *m, q * num_traits::pow(s.clone(), d as usize));
        }
        p
    }

    /// Total degree of the top monomials; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(e, _)| e.iter().sum()).max()
    }

    /// Sum of the top-total-degree terms.
    pub fn leading(&self) -> Self {
        let Some(d) = self.degree() else { return self.clone() };
        let mut p = Self::zero(self.nvars);
        for ((e, m), q) in &self.terms {
            if e.iter().sum::<u32>() == d {
                p.add_term(e.clone(), *m, q.clone());
            }
        }
        p
    }

    /// Re-expresses the polynomial in `target` variables, sending variable `j` to `map[j]`.
    pub fn substitute(&self, target: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut p = Self::zero(target);
        for ((e, m), q) in &self.terms {
            let mut ne = vec![0; target];
            for (j, &x) in e.iter().enumerate() {
                ne[map[j]] += x;
            }
            p.add_term(ne, *m, q.clone());
        }
        p
    }

    /// Replaces the last variable by `c₀ + Σ_{i<k-1} cᵢ xᵢ`, dropping one variable.
    pub fn eliminate_last(&self, c0: &BigRational, c: &[BigRational]) -> Self {
        let k = self.nvars;
        assert!(k >= 1 && c.len() == k - 1);
        let mut affine = Self::constant(k - 1, c0.clone(), 0);
        for (i, ci) in c.iter().enumerate() {
            affine = affine.add(&Self::var(k - 1, i).scale(ci));
        }
        let mut p = Self::zero(k - 1);
        for ((e, m), q) in &self.terms {
            let head = Self::from_terms(k - 1, [(e[..k - 1].to_vec(), *m, q.clone())]);
            p = p.add(&head.mul(&affine.pow(e[k - 1])));
        }
        p
    }

    /// Exact value grouped by the power of `π²`.
    pub fn pi_groups(&self, point: &[BigRational]) -> BTreeMap<u32, BigRational> {
        assert_eq!(point.len(), self.nvars);
        let mut out: BTreeMap<u32, BigRational> = BTreeMap::new();
        for ((e, m), q) in &self.terms {
            let mut v = q.clone();
            for (x, &k) in point.iter().zip(e) {
                v *= num_traits::pow(x.clone(), k as usize);
            }
            *out.entry(*m).or_insert_with(BigRational::zero) += v;
        }
        out
    }

    /// Evaluation with exact rational arithmetic; each `π²`-group is rounded once.
    pub fn eval(&self, point: &[f64]) -> f64 {
        let pt: Vec<BigRational> = point.iter().map(|&x| rat_from_f64(x)).collect();
        combine_pi_groups(&self.pi_groups(&pt))
    }

    /// Exact integral over a box, as a constant (zero-variable) polynomial.
    pub fn integrate_box(&self, lo: &[BigRational], hi: &[BigRational]) -> GradedPoly {
        assert!(lo.len() == self.nvars && hi.len() == self.nvars);
        let mut p = GradedPoly::zero(0);
        for ((e, m), q) in &self.terms {
            let mut v = q.clone();
            for i in 0..self.nvars {
                let k = e[i] as usize + 1;
                let num = num_traits::pow(hi[i].clone(), k) - num_traits::pow(lo[i].clone(), k);
                v *= num / BigRational::from_integer(BigInt::from(k));
            }
            p.add_term(vec![], *m, v);
        }
        p
    }

    /// Fast floating-point copy for inner loops.
    pub fn to_fast(&self) -> FastPoly {
        FastPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|((e, m), q)| (e.clone(), rat_to_f64(q) * (std::f64::consts::PI.powi(2 * *m as i32))))
                .collect(),
        }
    }

    /// Whether every term has `π`-power `(dim − |α|)/2`, with `|α|` the total degree.
    pub fn satisfies_grading(&self, dim: u32) -> bool {
        self.terms.iter().all(|((e, m), q)| {
            let d: u32 = e.iter().sum();
            d <= dim && 2 * m + d == dim && q.is_positive()
        })
    }

    /// Coefficient of `x^e π^{2m}` (zero if absent).
    pub fn coeff(&self, e: &[u32], m: u32) -> BigRational {
        self.terms.get(&(e.to_vec(), m)).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// `Σ_m g_m π^{2m}`, rounding each exact group once.
pub fn combine_pi_groups(groups: &BTreeMap<u32, BigRational>) -> f64 {
    groups
        .iter()
        .map(|(m, q)| rat_to_f64(q) * std::f64::consts::PI.powi(2 * *m as i32))
        .sum()
}

/// Graded-lex pretty printer: higher total degree first, then lexicographic
/// in the exponents, then by the power of `π`.
impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Mono> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(&a.0)).then_with(|| b.1.cmp(&a.1))
        });
        for (i, key) in keys.iter().enumerate() {
            let q = &self.terms[*key];
            let mut parts = Vec::new();
            let neg = q.is_negative();
            let aq = q.abs();
            let has_factor = key.1 > 0 || key.0.iter().any(|&e| e > 0);
            if !aq.is_one() || !has_factor {
                parts.push(aq.to_string());
            }
            match key.1 {
                0 => {}
                1 => parts.push("pi^2".into()),
                m => parts.push(format!("pi^{}", 2 * m)),
            }
            for (j, &e) in key.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("L{}", j + 1)),
                    _ => parts.push(format!("L{}^{}", j + 1, e)),
                }
            }
            let body = parts.join("*");
            match (i, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Floating-point polynomial used in sampler inner loops.
#[derive(Clone, Debug)]
pub struct FastPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl FastPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(*c, |acc, (&k, &xi)| acc * xi.powi(k as i32)))
            .sum()
    }

    /// Upper bound on `|P|` over the box `[0, hi]`.
    pub fn bound_on_box(&self, hi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(hi).fold(c.abs(), |acc, (&k, &h)| acc * h.abs().powi(k as i32)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_one() {
        assert_eq!(GradedPoly::one(2).eval(&[3.0, -1.0]), 1.0);
    }

    #[test]
    fn pi_squared_x_squared() {
        let p = GradedPoly::from_terms(1, [(vec![2], 1, rat(1, 1))]);
        assert!((p.eval(&[2.0]) - 4.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn leading_terms() {
        let p = GradedPoly::from_terms(1, [(vec![3], 0, rat(1, 1)), (vec![1], 1, rat(1, 1))]);
        let w = p.leading();
        assert_eq!(w, GradedPoly::from_terms(1, [(vec![3], 0, rat(1, 1))]));
        assert_eq!(w.leading(), w);
    }

    #[test]
    fn printer_order() {
        let p = GradedPoly::from_terms(1, [(vec![2], 0, rat(1, 48)), (vec![0], 1, rat(1, 12))]);
        assert_eq!(p.to_string(), "1/48*L1^2 + 1/12*pi^2");
    }

    #[test]
    fn box_integral() {
        // ∫₀² ∫₀¹ x y² dy dx = 2 · 1/3
        let p = GradedPoly::from_terms(2, [(vec![1, 2], 0, rat(1, 1))]);
        let r = p.integrate_box(&[rat(0, 1), rat(0, 1)], &[rat(2, 1), rat(1, 1)]);
        assert_eq!(r.coeff(&[], 0), rat(2, 3));
    }

    #[test]
    fn eliminate_affine() {
        // x² + y with y = 1 − 2x  →  x² − 2x + 1
        let p = GradedPoly::from_terms(2, [(vec![2, 0], 0, rat(1, 1)), (vec![0, 1], 0, rat(1, 1))]);
        let q = p.eliminate_last(&rat(1, 1), &[rat(-2, 1)]);
        assert_eq!(q.coeff(&[2], 0), rat(1, 1));
        assert_eq!(q.coeff(&[1], 0), rat(-2, 1));
        assert_eq!(q.coeff(&[0], 0), rat(1, 1));
    }

    proptest! {
        #[test]
        fn evaluation_is_linear(a in -50i64..50, b in -50i64..50, c in 1i64..20, x in -3.0f64..3.0) {
            let p = GradedPoly::from_terms(1, [(vec![2], 0, rat(a, c)), (vec![0], 1, rat(b, c))]);
            let q = GradedPoly::from_terms(1, [(vec![1], 1, rat(b, 1)), (vec![3], 0, rat(a, 1))]);
            let lhs = p.add(&q).eval(&[x]);
            let rhs = p.eval(&[x]) + q.eval(&[x]);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn fast_matches_exact(a in 1i64..50, b in 1i64..50, x in 0.0f64..10.0) {
            let p = GradedPoly::from_terms(1, [(vec![2], 0, rat(a, 7)), (vec![0], 2, rat(b, 3))]);
            let e = p.eval(&[x]);
            prop_assert!((p.to_fast().eval(&[x]) - e).abs() <= 1e-12 * e);
        }
    }
}
