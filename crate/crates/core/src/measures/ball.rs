//! Horosphere measure of Thurston-metric balls on the cusped torus.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::ToPrimitive;

use crate::counting::enumerate_simple_curves;
use crate::error::{Error, Result};
use crate::geometry::{remark, thurston_dist_bound, FNPoint, Mat2, Slope};
use crate::topology::{MultiCurveConfig, SurfaceSig};

/// Horosphere mass of a ball: `value` uses the rigorous lower distance bound
/// (the outer set), `bracket` is `(inner, outer)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallMass {
    pub value: f64,
    pub bracket: (f64, f64),
    /// Curve whose horosphere meets the ball, if any.
    pub slope: Option<Slope>,
}

impl BallMass {
    fn empty() -> Self {
        BallMass { value: 0.0, bracket: (0.0, 0.0), slope: None }
    }
}

fn big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// `L/a` and `1/a`, rounded once from exact rationals so that `(a, L)` and
/// `(a/L, 1)` give bit-identical levels.
fn level_and_weight(a: Rational64, l: f64) -> Result<(f64, f64)> {
    let lr = BigRational::from_float(l).ok_or_else(|| Error::InvalidInput(format!("L = {l}")))?;
    let inv = BigRational::from_integer(1.into()) / big(a);
    let level = (lr * inv.clone()).to_f64().unwrap_or(f64::NAN);
    Ok((level, inv.to_f64().unwrap_or(f64::NAN)))
}

/// Curve whose horosphere `{ℓ = level}` passes closest to `x`, with its length.
fn closest_curve(x: &FNPoint, level: f64, eps: f64) -> Result<Option<(Slope, f64)>> {
    let cands = enumerate_simple_curves(x, level * eps.exp())?;
    Ok(cands
        .into_iter()
        .filter(|(_, len)| (len / level).ln().abs() < eps)
        .min_by(|a, b| (a.1 / level).ln().abs().total_cmp(&(b.1 / level).ln().abs()).then(a.0.cmp(&b.0))))
}

/// The point of the horosphere `{a·ℓ_α = L}` reached from `x` by moving only
/// the length of `α`, where `α` is the curve whose length is closest to `L/a`.
pub fn horosphere_center(x: &FNPoint, a: Rational64, l: f64) -> Result<(FNPoint, Slope)> {
    let (level, _) = level_and_weight(a, l)?;
    let mut window = 0.25;
    let alpha = loop {
        if let Some((s, _)) = closest_curve(x, level, window)? {
            break s;
        }
        window *= 2.0;
        if window > 8.0 {
            return Err(Error::ConvergenceFailure("no curve near the horosphere".into()));
        }
    };
    let g = Mat2::sending_fn_to(alpha);
    let xh = remark(x, &g)?;
    let yh = FNPoint::torus(level, xh.twist_coord())?;
    Ok((remark(&yh, &g.inverse())?, alpha))
}

fn check(config: &MultiCurveConfig, a: Rational64, l: f64, x: &FNPoint, eps: f64) -> Result<()> {
    if config.base != SurfaceSig::torus() || config.k() != 1 || x.surface != SurfaceSig::torus() {
        return Err(Error::UnsupportedConfiguration("ball masses are implemented for k = 1 on S_{1,1}".into()));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidInput(format!("eps = {eps} must lie in (0, 0.5)")));
    }
    if a <= Rational64::from_integer(0) || !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidInput("a and L must be positive".into()));
    }
    Ok(())
}

/// `η^L_{α,a}(U_x(ε))` for the curve `α` whose horosphere passes closest to
/// `x`: the horosphere is the twist line `ℓ_α = L/a` with measure `dτ/a`, and
/// ball membership uses `thurston_dist_bound` at Farey depth `depth`.
pub fn estimate_horosphere_ball_mass(
    config: &MultiCurveConfig,
    a: Rational64,
    l: f64,
    x: &FNPoint,
    eps: f64,
    depth: u32,
) -> Result<BallMass> {
    check(config, a, l, x, eps)?;
    let (level, weight) = level_and_weight(a, l)?;
    let Some((alpha, _)) = closest_curve(x, level, eps)? else {
        return Ok(BallMass::empty());
    };
    let g = Mat2::sending_fn_to(alpha);
    let ginv = g.inverse();
    let tau0 = remark(x, &g)?.twist_coord();
    let dist = |t: f64| -> Result<(f64, f64)> {
        let y = remark(&FNPoint::torus(level, tau0 + t)?, &ginv)?;
        thurston_dist_bound(x, &y, depth)
    };
    // Window: double until both ends leave the outer set.
    let mut half = 1e-3 * eps * level.recip().min(1.0);
    let mut grown = 0;
    while dist(half)?.0 < eps || dist(-half)?.0 < eps {
        half *= 2.0;
        grown += 1;
        if grown > 80 {
            return Err(Error::ConvergenceFailure("ball does not close along the horosphere".into()));
        }
    }
    const GRID: usize = 256;
    let h = 2.0 * half / GRID as f64;
    let ts: Vec<f64> = (0..=GRID).map(|i| -half + h * i as f64).collect();
    let ds = ts.iter().map(|&t| dist(t)).collect::<Result<Vec<_>>>()?;
    let outer = measure_set(&ts, &ds, |d| d.0 < eps, &dist)?;
    let inner = measure_set(&ts, &ds, |d| d.1 < eps, &dist)?;
    Ok(BallMass { value: weight * outer, bracket: (weight * inner, weight * outer), slope: Some(alpha) })
}

/// Length of `{t : inside(dist(t))}` from grid values, bisecting each cell
/// whose endpoints disagree.
fn measure_set(
    ts: &[f64],
    ds: &[(f64, f64)],
    inside: impl Fn((f64, f64)) -> bool,
    dist: &impl Fn(f64) -> Result<(f64, f64)>,
) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..ts.len() - 1 {
        let (a, b) = (inside(ds[i]), inside(ds[i + 1]));
        let w = ts[i + 1] - ts[i];
        if a && b {
            total += w;
        } else if a != b {
            let (mut lo, mut hi) = (ts[i], ts[i + 1]);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if inside(dist(mid)?) == a {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * w.max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            let cross = 0.5 * (lo + hi);
            total += if a { cross - ts[i] } else { ts[i + 1] - cross };
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(l: f64) -> (MultiCurveConfig, FNPoint) {
        let x0 = FNPoint::torus(1.1, 0.3).unwrap();
        let (c, _) = horosphere_center(&x0, Rational64::from_integer(1), l).unwrap();
        (MultiCurveConfig::torus_curve(), c)
    }

    #[test]
    fn far_ball_is_empty() {
        let x = FNPoint::modular();
        let m = estimate_horosphere_ball_mass(&MultiCurveConfig::torus_curve(), Rational64::from_integer(1), 0.3, &x, 0.1, 6)
            .unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn monotone_in_eps() {
        let (c, x) = setup(12.0);
        let one = Rational64::from_integer(1);
        let mut last = 0.0;
        for eps in [0.02, 0.05, 0.1, 0.2] {
            let m = estimate_horosphere_ball_mass(&c, one, 12.0, &x, eps, 8).unwrap();
            assert!(m.value > last);
            assert!(m.bracket.0 <= m.bracket.1);
            last = m.value;
        }
    }

    #[test]
    fn rescaling_identity() {
        let (c, x) = setup(12.0);
        let m = estimate_horosphere_ball_mass(&c, Rational64::from_integer(1), 12.0, &x, 0.1, 8).unwrap();
        let m1 = estimate_horosphere_ball_mass(&c, Rational64::new(1, 12), 1.0, &x, 0.1, 8).unwrap();
        assert!((m1.value / m.value - 12.0).abs() < 1e-6 * 12.0);
    }
}
