//! Hyperbolic structures on the complexity-one surfaces: the cusped torus,
//! the one-holed torus and the four-punctured sphere.

mod holonomy;
mod point;
mod slope;
pub(crate) mod topograph;

pub use holonomy::{
    build_holonomy, det, kappa_for_boundary, mat_inv, mat_mul, sphere_relation, trace, Cover, Holonomy, Mat,
    Model, TraceTriple,
};
pub(crate) use holonomy::{chart_from_triple, chart_triple, model, torus_chart};
pub use point::{modular_length, FNPoint};
pub use slope::{intersection_number, Mat2, Slope, WeightedSlope};
pub use topograph::slope_trace;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::topology::MultiCurveConfig;
use topograph::{collect_below, other_root, trace_of, V};

pub fn curve_length(x: &FNPoint, c: Slope) -> Result<f64> {
    if c == Slope::FN {
        return Ok(x.length());
    }
    model(x)?.length_of_vec((c.p as i128, c.q as i128))
}

/// `Σ aᵢ ℓ(slopeᵢ)`.
pub fn multicurve_length(x: &FNPoint, config: &MultiCurveConfig, realization: &[Slope]) -> Result<f64> {
    if realization.len() != config.k() {
        return Err(Error::InvalidInput(format!(
            "realization has {} slopes for a {}-component multicurve",
            realization.len(),
            config.k()
        )));
    }
    let mut total = 0.0;
    for (a, s) in config.weights_f64().iter().zip(realization) {
        total += a * curve_length(x, *s)?;
    }
    Ok(total)
}

/// Fenchel–Nielsen twist of pants curve `i` by `t`.
pub fn twist(x: &FNPoint, i: usize, t: f64) -> FNPoint {
    let mut y = x.clone();
    y.twists[i] += t;
    y
}

/// Re-marks `x` by `g`: the result assigns to slope `v` the length `x` assigns to `g·v`.
pub fn remark(x: &FNPoint, g: &Mat2) -> Result<FNPoint> {
    let m = model(x)?;
    let tri = TraceTriple {
        x: trace_of(&m.triple, m.kappa, g.apply((0, 1))),
        y: trace_of(&m.triple, m.kappa, g.apply((1, 0))),
        z: trace_of(&m.triple, m.kappa, g.apply((1, 1))),
    };
    point_from_triple(x, &tri, m.kappa, m.cover)
}

fn point_from_triple(template: &FNPoint, tri: &TraceTriple, kappa: f64, cover: Cover) -> Result<FNPoint> {
    if tri.x - 2.0 <= 1e-12 {
        return Err(Error::NumericalInstability(format!("trace {} is not hyperbolic", tri.x)));
    }
    let (l, tau) = chart_from_triple(tri, kappa);
    let mut y = template.clone();
    y.pants_curve_lengths[0] = match cover {
        Cover::Torus => l,
        Cover::Sphere => 2.0 * l,
    };
    y.twists[0] = tau;
    Ok(y)
}

/// Twist deformation of time `t` along the curve `s`.
pub fn twist_along(x: &FNPoint, s: Slope, t: f64) -> Result<FNPoint> {
    if s == Slope::FN {
        return Ok(twist(x, 0, t));
    }
    let g = Mat2::sending_fn_to(s);
    let adapted = twist(&remark(x, &g)?, 0, t);
    remark(&adapted, &g.inverse())
}

/// Earthquake of time `t` along the unit-length normalization of `𝐚·γ`.
pub fn earthquake_unit(x: &FNPoint, config: &MultiCurveConfig, realization: &[Slope], t: f64) -> Result<FNPoint> {
    let total = multicurve_length(x, config, realization)?;
    let mut y = x.clone();
    for (a, s) in config.weights_f64().iter().zip(realization) {
        y = twist_along(&y, *s, t * a / total)?;
    }
    Ok(y)
}

/// Vieta descent to the Farey triangle of smallest traces.
pub(crate) fn well(tri: &TraceTriple, kappa: f64) -> Result<([V; 3], [f64; 3])> {
    let mut v: [V; 3] = [(0, 1), (1, 0), (1, 1)];
    let mut t = [tri.x, tri.y, tri.z];
    for it in 0..100_000 {
        // Ordinary descents take a few dozen flips; longer runs twist around
        // one short curve and are collapsed in closed form.
        if it % 32 == 31 {
            recenter(&mut v, &mut t, kappa);
        }
        let i = (0..3).max_by(|&a, &b| t[a].total_cmp(&t[b])).unwrap();
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let new = (t[j] * t[j] + t[k] * t[k] - kappa) / t[i];
        if new >= t[i] {
            return Ok((v, t));
        }
        let sum = (v[j].0 + v[k].0, v[j].1 + v[k].1);
        let diff = (v[j].0 - v[k].0, v[j].1 - v[k].1);
        let is_old = |w: V| w == v[i] || w == (-v[i].0, -v[i].1);
        v[i] = if is_old(sum) { diff } else { sum };
        t[i] = new;
    }
    Err(Error::ConvergenceFailure("trace descent did not reach a minimum".into()))
}

/// Jumps along the twist line around the smallest vertex `s`. The traces of
/// `a + n·s` satisfy the same recurrence as the chart formula in `(ℓ_s, τ_s)`,
/// so `n` full twists are one shift of `τ_s`.
fn recenter(v: &mut [V; 3], t: &mut [f64; 3], kappa: f64) {
    let s = (0..3).min_by(|&a, &b| t[a].total_cmp(&t[b])).unwrap();
    if !(t[s] - 2.0 > 1e-12) {
        return;
    }
    let (j, k) = ((s + 1) % 3, (s + 2) % 3);
    let scale = |w: V, c: i128| (w.0 * c, w.1 * c);
    let add = |x: V, y: V| (x.0 + y.0, x.1 + y.1);
    // Orient the triangle as (s, a, a + s).
    let mut found = None;
    'search: for (a, b) in [(j, k), (k, j)] {
        for ea in [1, -1] {
            for es in [1, -1] {
                let sum = add(scale(v[a], ea), scale(v[s], es));
                if sum == v[b] || sum == scale(v[b], -1) {
                    found = Some((a, b, scale(v[a], ea), scale(v[s], es)));
                    break 'search;
                }
            }
        }
    }
    let Some((a, b, va, vs)) = found else { return };
    let (l, tau) = chart_from_triple(&TraceTriple { x: t[s], y: t[a], z: t[b] }, kappa);
    let n = -(tau / l).round();
    if !(n.abs() >= 2.0 && n.abs() < 1e15) {
        return;
    }
    let n = n as i128;
    let (Some(p), Some(q)) = (vs.0.checked_mul(n), vs.1.checked_mul(n)) else { return };
    let tri = chart_triple(l, tau + n as f64 * l, kappa);
    if !(tri.y.is_finite() && tri.z.is_finite()) {
        return;
    }
    v[a] = (va.0 + p, va.1 + q);
    v[b] = add(v[a], vs);
    t[a] = tri.y;
    t[b] = tri.z;
}

/// Shortest curve, ties broken by the smallest `(|p|+|q|, p, q)`.
pub fn systole(x: &FNPoint) -> Result<(Slope, f64)> {
    shortest_where(x, |_| true)
}

/// Shortest curve among the slopes accepted by `keep` (which must accept some
/// slope of every Farey triangle, e.g. a parity class).
pub(crate) fn shortest_where(x: &FNPoint, keep: impl Fn(Slope) -> bool) -> Result<(Slope, f64)> {
    let (l, tau, kappa, cover) = torus_chart(x)?;
    // Lengths of x at v equal lengths of x0 at Tⁿv, with x0 twist-reduced.
    let n = (tau / l).floor();
    let tri = chart_triple(l, tau - n * l, kappa);
    let n = n as i64;
    let m = Model { triple: tri, kappa, cover };
    let (_, wt) = well(&tri, kappa)?;
    // Every slope is at most max(well) away in trace from some triangle vertex
    // of each class, so this bound always contains the answer.
    let bound = wt.iter().cloned().fold(f64::MIN, f64::max) * (1.0 + 1e-9);
    let cands = collect_below(&tri, kappa, bound, 1 << 22, Exec::Sequential)?;
    let mut best: Option<(Slope, f64)> = None;
    for (u, tr) in cands {
        let v = u.dehn_twist(-n);
        if !keep(v) {
            continue;
        }
        let len = if v == Slope::FN { x.length() } else { m.length_from_trace(tr)? };
        best = match best {
            None => Some((v, len)),
            Some((bs, bl)) => {
                let tol = 1e-12 * bl.max(1.0);
                if len < bl - tol || ((len - bl).abs() <= tol && v < bs) {
                    Some((v, len))
                } else {
                    Some((bs, bl))
                }
            }
        };
    }
    best.ok_or_else(|| Error::ConvergenceFailure("no candidate curve found".into()))
}

pub fn in_thick_part(x: &FNPoint, eps: f64) -> Result<bool> {
    Ok(systole(x)?.1 >= eps)
}

/// Bracket for the symmetric Thurston distance from slopes of Farey depth ≤ `depth`.
///
/// The lower bound is rigorous; the upper bound `lower·(1 + 4·2^−depth)` is a
/// heuristic.
pub fn thurston_dist_bound(x: &FNPoint, y: &FNPoint, depth: u32) -> Result<(f64, f64)> {
    if x.surface != y.surface {
        return Err(Error::InvalidInput("points lie on different surfaces".into()));
    }
    let (mx, my) = (model(x)?, model(y)?);
    let mut lower: f64 = 0.0;
    let mut err = None;
    topograph::visit_depth(&[(mx.triple, mx.kappa), (my.triple, my.kappa)], depth, |s, t| {
        let lens = if s == Slope::FN {
            Ok((x.length(), y.length()))
        } else {
            mx.length_from_trace(t[0]).and_then(|a| Ok((a, my.length_from_trace(t[1])?)))
        };
        match lens {
            Ok((a, b)) => lower = lower.max((b / a).ln().abs()),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok((lower, lower * (1.0 + 4.0 * 0.5f64.powi(depth as i32))))
}

/// Trace of the vertex opposite `d` across the edge `(a, b)`.
pub fn flip_trace(a: f64, b: f64, d: f64, kappa: f64) -> f64 {
    other_root(a, b, d, kappa)
}

/// Slope-indexed traces of a point (torus traces for the sphere).
pub fn traces(x: &FNPoint, slopes: &[Slope]) -> Result<Vec<f64>> {
    let m = model(x)?;
    Ok(slopes.iter().map(|s| slope_trace(&m.triple, m.kappa, *s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{MultiCurveConfig, SurfaceSig};
    use num_rational::Rational64;
    use proptest::prelude::*;

    #[test]
    fn fn_curve_length_is_exact() {
        let x = FNPoint::torus(0.123456789, 7.0).unwrap();
        assert_eq!(curve_length(&x, Slope::FN).unwrap(), 0.123456789);
    }

    #[test]
    fn modular_systole() {
        let (s, l) = systole(&FNPoint::modular()).unwrap();
        assert_eq!(s, Slope::FN);
        assert!((l - modular_length()).abs() < 1e-15);
        assert!(in_thick_part(&FNPoint::modular(), 1.0).unwrap());
    }

    #[test]
    fn short_fn_curve_is_systole() {
        let x = FNPoint::torus(0.1, 0.0).unwrap();
        assert_eq!(systole(&x).unwrap(), (Slope::FN, 0.1));
        assert!(!in_thick_part(&x, 0.5).unwrap());
    }

    #[test]
    fn long_twist_runs_are_collapsed() {
        // A long FN curve with twist near ℓ/2: the dual curve has length
        // ≈ |τ − ℓ/2| and sits ~10⁵ single flips away from the starting triangle.
        for (l, tau) in [(100.0, 50.0006202036014855), (76.9505175606578, 38.4747919857989729), (40.0, 20.0 + 1e-3)] {
            let x = FNPoint::torus(l, tau).unwrap();
            let (s, len) = systole(&x).unwrap();
            let dual = curve_length(&x, Slope::DUAL).unwrap();
            assert!(len <= dual * (1.0 + 1e-9), "({l}, {tau}): {s} {len} vs dual {dual}");
            assert!(len < 2.0 * (tau - l / 2.0).abs() + 1e-6);
        }
    }

    #[test]
    fn systole_follows_the_marking_under_full_twists() {
        let x = FNPoint::torus(3.0, 0.4).unwrap();
        let (s, l) = systole(&x).unwrap();
        let y = twist(&x, 0, 2.0 * 3.0);
        let (s2, l2) = systole(&y).unwrap();
        assert!((l - l2).abs() < 1e-12);
        assert_eq!(s2.dehn_twist(2), s);
    }

    #[test]
    fn multicurve_scaling() {
        let x = FNPoint::torus(2.0, 0.0).unwrap();
        let cfg = MultiCurveConfig::new(SurfaceSig::torus(), "nonsep", Some(vec![Rational64::new(3, 2)])).unwrap();
        assert_eq!(multicurve_length(&x, &cfg, &[Slope::FN]).unwrap(), 3.0);
    }

    #[test]
    fn twist_along_fn_is_coordinate_twist() {
        let x = FNPoint::torus(1.5, 0.2).unwrap();
        let cfg = MultiCurveConfig::torus_curve();
        let y = earthquake_unit(&x, &cfg, &[Slope::FN], 0.9).unwrap();
        assert_eq!(y, twist(&x, 0, 0.9 / 1.5));
    }

    #[test]
    fn thurston_bound_basics() {
        let x = FNPoint::torus(1.2, 0.3).unwrap();
        assert_eq!(thurston_dist_bound(&x, &x, 6).unwrap(), (0.0, 0.0));
        let y = twist(&x, 0, 0.01);
        let mut prev = 0.0;
        for d in 0..8 {
            let (lo, hi) = thurston_dist_bound(&x, &y, d).unwrap();
            assert!(lo >= prev && hi >= lo);
            prev = lo;
        }
        assert!(thurston_dist_bound(&x, &y, 2).unwrap().0 > 0.0);
    }

    #[test]
    fn remark_round_trip() {
        let x = FNPoint::torus(0.8, 0.35).unwrap();
        let g = Mat2::sending_fn_to(Slope::new(3, 5).unwrap());
        let y = remark(&remark(&x, &g).unwrap(), &g.inverse()).unwrap();
        assert!((y.length() - x.length()).abs() < 1e-10);
        assert!((y.twist_coord() - x.twist_coord()).abs() < 1e-9);
        let s = Slope::new(-2, 7).unwrap();
        let lx = curve_length(&x, g.apply_slope(s)).unwrap();
        let ly = curve_length(&remark(&x, &g).unwrap(), s).unwrap();
        assert!((lx - ly).abs() < 1e-9 * lx);
    }

    #[test]
    fn twisting_along_a_curve_preserves_its_length() {
        let x = FNPoint::torus(1.1, 0.25).unwrap();
        let s = Slope::new(2, 3).unwrap();
        let l0 = curve_length(&x, s).unwrap();
        let y = twist_along(&x, s, 0.7).unwrap();
        assert!((curve_length(&y, s).unwrap() - l0).abs() < 1e-9);
        assert!((curve_length(&y, Slope::FN).unwrap() - x.length()).abs() > 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn full_twist_acts_by_dehn_twist(l in 0.1f64..6.0, f in 0.0f64..1.0, p in -6i64..6, q in 1i64..6) {
            prop_assume!(slope::gcd(p as i128, q as i128) == 1);
            let x = FNPoint::torus(l, f * l).unwrap();
            let s = Slope::new(p, q).unwrap();
            let after = curve_length(&twist(&x, 0, l), s).unwrap();
            let before = curve_length(&x, s.dehn_twist(1)).unwrap();
            prop_assert!((after - before).abs() < 1e-9 * before.max(1.0));
        }

        #[test]
        fn earthquake_semigroup(l in 0.1f64..6.0, tau in -3.0f64..3.0, s in -5.0f64..5.0, t in -5.0f64..5.0) {
            let x = FNPoint::torus(l, tau).unwrap();
            let cfg = MultiCurveConfig::torus_curve();
            let a = earthquake_unit(&earthquake_unit(&x, &cfg, &[Slope::FN], s).unwrap(), &cfg, &[Slope::FN], t).unwrap();
            let b = earthquake_unit(&x, &cfg, &[Slope::FN], s + t).unwrap();
            prop_assert_eq!(a.length(), b.length());
            prop_assert!((a.twist_coord() - b.twist_coord()).abs() < 1e-12 * (1.0 + b.twist_coord().abs()));
        }

        #[test]
        fn relation_holds(l in 0.05f64..10.0, f in 0.0f64..1.0, b in 0.0f64..6.0) {
            let x = if b == 0.0 { FNPoint::torus(l, f * l) } else { FNPoint::holed_torus(l, f * l, b) }.unwrap();
            let h = build_holonomy(&x).unwrap();
            prop_assert!(h.triple.relative_residual(h.kappa) < 1e-9);
            prop_assert_eq!(h.triple.x, 2.0 * (l / 2.0).cosh());
        }
    }
}
