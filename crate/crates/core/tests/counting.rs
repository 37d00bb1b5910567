mod common;

use std::collections::BTreeSet;

use common::oracle_lengths;
use horolab::counting::{
    count_integral_multicurves, enumerate_simple_curves, unit_ball_area, THURSTON_KAPPA,
};
use horolab::geometry::FNPoint;

/// Slopes are unoriented; compare them with `p > 0` or `(0, 1)`.
fn canon(p: i64, q: i64) -> (i64, i64) {
    if p < 0 || (p == 0 && q < 0) { (-p, -q) } else { (p, q) }
}

/// Box enumeration with matrix-word lengths finds exactly the enumerated set.
#[test]
fn farey_enumeration_matches_box_enumeration() {
    for (l, tau, cutoff) in [(1.3, 0.4, 9.0), (0.6, 0.1, 8.0), (2.5, 1.9, 10.0), (4.0, 0.0, 10.0)] {
        let x = FNPoint::torus(l, tau).unwrap();
        let got: BTreeSet<(i64, i64)> =
            enumerate_simple_curves(&x, cutoff).unwrap().into_iter().map(|(s, _)| canon(s.p, s.q)).collect();
        let h = 40;
        assert!(got.iter().all(|(p, q)| p.abs().max(q.abs()) < h), "box too small");
        let want: BTreeSet<(i64, i64)> =
            oracle_lengths(l, tau, 0.0, h).into_iter().filter(|(_, len)| *len <= cutoff).map(|((p, q), _)| canon(p, q)).collect();
        assert_eq!(got, want, "({l}, {tau})");
    }
}

/// The Thurston normalization re-derived from integral multicurve counts on
/// two unrelated points; the frozen constant must agree with both.
#[test]
fn thurston_normalization_from_counts() {
    let l = 200.0;
    for x in [FNPoint::modular(), FNPoint::torus(0.7, 0.25).unwrap()] {
        let c = count_integral_multicurves(&x, l).unwrap().count as f64;
        let kappa = c / (l * l * unit_ball_area(&x).unwrap());
        assert!((kappa / THURSTON_KAPPA - 1.0).abs() < 0.02, "derived {kappa}");
    }
}
