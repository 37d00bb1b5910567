//! Simple closed geodesics, integral multicurves and the Thurston measure on
//! complexity-one surfaces.
//!
//! Measured laminations are points `(u, v)` of the plane; the integral point
//! `w·(q, p)` is `w` parallel copies of the slope `p/q`, so `(1, 0)` is the
//! Fenchel–Nielsen curve. The Thurston measure is normalized by integral
//! multicurve counting, under which it is one half of planar Lebesgue measure
//! (integer vectors are counted once per sign pair).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::topograph::{collect_below, roots};
use crate::geometry::{model, FNPoint, Model, Slope};
use crate::topology::{MultiCurveConfig, SurfaceSig};

/// Default enumeration budget.
pub const DEFAULT_CAP: usize = 100_000_000;

/// Ratio of the Thurston measure to Lebesgue measure in `(u, v)` coordinates.
///
/// Fixed from the counting normalization; the integration tests re-derive it
/// from counts on two unrelated surfaces.
pub const THURSTON_KAPPA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    #[serde(rename = "L")]
    pub l: f64,
    pub count: u64,
    /// `count / L^exponent`.
    pub normalized: f64,
    pub exponent: i32,
}

impl CountResult {
    fn new(l: f64, count: u64, exponent: i32) -> Self {
        let normalized = if l > 0.0 { count as f64 / l.powi(exponent) } else { 0.0 };
        CountResult { l, count, normalized, exponent }
    }
}

/// Measured lamination on a complexity-one surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaminationCoord {
    pub u: f64,
    pub v: f64,
}

impl LaminationCoord {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite()) || (u == 0.0 && v == 0.0) {
            return Err(Error::InvalidInput(format!("({u}, {v}) is not a lamination")));
        }
        Ok(if v < 0.0 || (v == 0.0 && u < 0.0) {
            LaminationCoord { u: -u, v: -v }
        } else {
            LaminationCoord { u, v }
        })
    }

    /// Weighted slope `w·(p/q)`.
    pub fn from_slope(s: Slope, w: f64) -> Self {
        Self::new(w * s.q as f64, w * s.p as f64).expect("nonzero")
    }
}

fn exponent(x: &FNPoint) -> i32 {
    // Both geometry-supported base surfaces have a two-dimensional moduli space.
    let s = if x.surface == SurfaceSig::holed_torus() { SurfaceSig::torus() } else { x.surface };
    s.dim() as i32
}

/// Slopes with trace at most the bound for length `l`, with exact lengths.
fn slopes_up_to(x: &FNPoint, l: f64, cap: usize, exec: Exec) -> Result<Vec<(Slope, f64)>> {
    if !(l > 0.0) {
        return Ok(Vec::new());
    }
    let m = model(x)?;
    let bound = m.trace_from_length(l) * (1.0 + 1e-12);
    let raw = collect_below(&m.triple, m.kappa, bound, cap, exec)?;
    let mut out = Vec::with_capacity(raw.len());
    for (s, t) in raw {
        let len = if s == Slope::FN { x.length() } else { m.length_from_trace(t)? };
        if len <= l {
            out.push((s, len));
        }
    }
    Ok(out)
}

/// Every simple closed geodesic of length at most `l`, sorted by length and then slope.
pub fn enumerate_simple_curves(x: &FNPoint, l: f64) -> Result<Vec<(Slope, f64)>> {
    enumerate_simple_curves_with(x, l, DEFAULT_CAP, Exec::default())
}

pub fn enumerate_simple_curves_with(x: &FNPoint, l: f64, cap: usize, exec: Exec) -> Result<Vec<(Slope, f64)>> {
    let mut v = slopes_up_to(x, l, cap, exec)?;
    v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(v)
}

/// The mapping-class orbit of the curve type, realized by the FN curve.
pub(crate) fn orbit_filter(x: &FNPoint, config: &MultiCurveConfig) -> Result<fn(Slope) -> bool> {
    let base = if x.surface == SurfaceSig::holed_torus() { SurfaceSig::torus() } else { x.surface };
    if config.base != base {
        return Err(Error::InvalidInput(format!("{} configuration on a point of {}", config.base, x.surface)));
    }
    if config.k() != 1 {
        return Err(Error::UnsupportedConfiguration("orbit counting needs a single curve".into()));
    }
    Ok(if base == SurfaceSig::sphere4() { |s: Slope| s.parity() == (0, 1) } else { |_| true })
}

/// Number of curves of the given type with `ℓ ≤ b₁·L`.
pub fn count_s(x: &FNPoint, config: &MultiCurveConfig, b: &[f64], l: f64) -> Result<CountResult> {
    count_s_with(x, config, b, l, DEFAULT_CAP, Exec::default())
}

pub fn count_s_with(
    x: &FNPoint,
    config: &MultiCurveConfig,
    b: &[f64],
    l: f64,
    cap: usize,
    exec: Exec,
) -> Result<CountResult> {
    let keep = orbit_filter(x, config)?;
    if b.len() != 1 || !(b[0] > 0.0) {
        return Err(Error::InvalidInput("need exactly one positive scale b₁".into()));
    }
    let n = slopes_up_to(x, b[0] * l, cap, exec)?.into_iter().filter(|(s, _)| keep(s.clone())).count();
    Ok(CountResult::new(l, n as u64, exponent(x)))
}

pub fn count_m(x: &FNPoint, config: &MultiCurveConfig, l: f64) -> Result<CountResult> {
    count_s(x, config, &vec![1.0; config.k()], l)
}

/// `Σ_c ⌊L/ℓ_c⌋` over all curves.
pub fn count_integral_multicurves(x: &FNPoint, l: f64) -> Result<CountResult> {
    count_integral_multicurves_with(x, l, DEFAULT_CAP, Exec::default())
}

pub fn count_integral_multicurves_with(x: &FNPoint, l: f64, cap: usize, exec: Exec) -> Result<CountResult> {
    let n: u64 = slopes_up_to(x, l, cap, exec)?.iter().map(|(_, len)| (l / len).floor() as u64).sum();
    Ok(CountResult::new(l, n, exponent(x)))
}

/// Mirzakhani function from counting at `l_max`, with the relative drift from `l_max/2`.
pub fn estimate_b(x: &FNPoint, l_max: f64) -> Result<(f64, f64)> {
    if !(l_max >= 40.0) {
        return Err(Error::InvalidInput(format!("L_max = {l_max} is below 40")));
    }
    let hi = count_integral_multicurves(x, l_max)?.normalized;
    let lo = count_integral_multicurves(x, l_max / 2.0)?.normalized;
    Ok((hi, (hi - lo).abs() / hi))
}

fn model_length(m: &Model, x: &FNPoint, p: i128, q: i128) -> Result<f64> {
    if p == 0 {
        return Ok(x.length());
    }
    m.length_of_vec((p, q))
}

/// Length of a measured lamination, the degree-one extension of curve length.
pub fn lamination_length(x: &FNPoint, lam: LaminationCoord) -> Result<f64> {
    lamination_length_with_error(x, lam).map(|(l, _)| l)
}

/// Length and an error estimate (zero for rational laminations).
pub fn lamination_length_with_error(x: &FNPoint, lam: LaminationCoord) -> Result<(f64, f64)> {
    let m = model(x)?;
    // Slope vector (p, q) = (v, u).
    let (p, q) = (lam.v, lam.u);
    if p.fract() == 0.0 && q.fract() == 0.0 && p.abs() < 9e15 && q.abs() < 9e15 {
        let (pi, qi) = (p as i128, q as i128);
        let w = crate::geometry::Mat2::ID.apply((pi, qi));
        let g = gcd(w.0, w.1);
        let len = model_length(&m, x, pi / g, qi / g)?;
        return Ok((g as f64 * len, 0.0));
    }
    convergent_lengths(x, &m, p, q, 1e-12, 1e9).map(|(l, e, _)| (l, e))
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Lengths along continued-fraction convergents of the direction `(p, q)`.
/// Returns the last estimate, its change from the previous one, and the
/// whole sequence.
pub(crate) fn convergent_lengths(
    x: &FNPoint,
    m: &Model,
    p: f64,
    q: f64,
    tol: f64,
    max_den: f64,
) -> Result<(f64, f64, Vec<f64>)> {
    let sign = if (p < 0.0) != (q < 0.0) { -1i128 } else { 1 };
    let (ap, aq) = (p.abs(), q.abs());
    // Continued fraction of ap/aq, run on the pair to avoid drifting ratios.
    let (mut num, mut den) = (ap, aq);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut seq = Vec::new();
    for _ in 0..90 {
        if den == 0.0 {
            break;
        }
        let a = (num / den).floor();
        let rem = num - a * den;
        let a = a as i128;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if (h2.max(k2) as f64) > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let (cp, cq) = (sign * h1, k1);
        // Slopes are unoriented: the convergent may point against (p, q).
        let t = ((p * cp as f64 + q * cq as f64) / ((cp * cp + cq * cq) as f64)).abs();
        let g = gcd(cp, cq);
        seq.push(t * g as f64 * model_length(m, x, cp / g, cq / g)?);
        (num, den) = (den, rem);
        let n = seq.len();
        if n >= 2 && (seq[n - 1] - seq[n - 2]).abs() <= tol * seq[n - 1] {
            break;
        }
    }
    let n = seq.len();
    let last = *seq.last().ok_or_else(|| Error::ConvergenceFailure("empty convergent sequence".into()))?;
    let change = if n >= 2 { (seq[n - 1] - seq[n - 2]).abs() } else { 0.0 };
    if den != 0.0 && change > 1e-6 * last {
        return Err(Error::ConvergenceFailure(format!("convergents still move by {change:e}")));
    }
    Ok((last, change, seq))
}

/// Lebesgue area of the unit length ball `{ℓ ≤ 1}` in the `(u, v)` plane,
/// from an inscribed polygon refined along the Farey tree.
pub fn unit_ball_area(x: &FNPoint) -> Result<f64> {
    unit_ball_area_tol(x, 1e-7)
}

pub fn unit_ball_area_tol(x: &FNPoint, rel_tol: f64) -> Result<f64> {
    let m = model(x)?;
    let len = |t: f64| m.length_from_trace(t);
    let lx = x.length();
    let ly = len(m.triple.y)?;
    let mut area = 0.0;
    // Each root edge (l, r) spans one quadrant of the upper half plane.
    let mut stack = Vec::new();
    for node in roots(&m.triple, m.kappa) {
        let (la, lb) = if node.l == (0, 1) { (lx, ly) } else { (ly, lx) };
        area += 0.5 / (la * lb);
        stack.push((node, la, lb));
    }
    let mut nodes = 0usize;
    while let Some((node, la, lb)) = stack.pop() {
        nodes += 1;
        if nodes > 5_000_000 {
            return Err(Error::ConvergenceFailure("unit ball refinement did not settle".into()));
        }
        let (mv, tm) = node.mediant(m.kappa);
        let lm = len(tm)?;
        let edge = 0.5 / (la * lb);
        let gain = 0.5 * (1.0 / (la * lm) + 1.0 / (lm * lb)) - edge;
        area += gain;
        if gain > rel_tol * edge {
            let [a, b] = node.children(mv, tm);
            stack.push((a, la, lm));
            stack.push((b, lm, lb));
        }
    }
    Ok(2.0 * area)
}

/// Mirzakhani function `B(X)`: Thurston measure of the unit length ball.
pub fn mirzakhani_function(x: &FNPoint) -> Result<f64> {
    Ok(THURSTON_KAPPA * unit_ball_area(x)?)
}

pub use crate::geometry::intersection_number;
