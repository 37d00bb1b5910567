//! Independent oracles for the integration tests. Nothing here goes through
//! the trace recursion: curve traces are traces of explicit matrix words.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use horolab::geometry::FNPoint;
use horolab::measures::{sample_wp_cell, SamplerConfig};
use horolab::topology::SurfaceSig;

pub type M = [[f64; 2]; 2];

pub fn mul(a: &M, b: &M) -> M {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn inv(a: &M) -> M {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn tr(a: &M) -> f64 {
    a[0][0] + a[1][1]
}

fn diag(e: f64) -> M {
    [[e.exp(), 0.0], [0.0, (-e).exp()]]
}

/// Generators `(A, B)` of a one-holed torus group: `A` translates by `ℓ`
/// along the imaginary axis, and `B = B₀(μ)·D(τ)` is cut along that axis and
/// reglued with shift `τ`. The free parameter `μ` is fixed by solving
/// `tr[A, B] = −2cosh(b/2)` by bisection (`b = 0` is a cusp).
pub fn generators(l: f64, tau: f64, b: f64) -> (M, M) {
    let a = diag(l / 2.0);
    let make = |mu: f64| -> M {
        let b0 = [[mu * (-l / 4.0).exp(), 1.0], [mu * mu - 1.0, mu * (l / 4.0).exp()]];
        mul(&b0, &diag(tau / 2.0))
    };
    let comm = |mu: f64| {
        let bm = make(mu);
        tr(&mul(&mul(&a, &bm), &mul(&inv(&a), &inv(&bm))))
    };
    let target = -2.0 * (b / 2.0).cosh();
    // comm(1) = 2 and comm decreases to −∞.
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while comm(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if comm(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    (a, make(0.5 * (lo + hi)))
}

/// Traces of every slope `(p, q)` (`p ≥ 0`, primitive) with `max(|p|, |q|) ≤ h`,
/// as words in `A = 0/1` and `B = 1/0`: Stern–Brocot mediants multiply the
/// words of their parents. All entries stay positive, so no cancellation.
pub fn word_traces(a: &M, b: &M, h: i64) -> BTreeMap<(i64, i64), f64> {
    fn rec(l: &M, lv: (i64, i64), r: &M, rv: (i64, i64), h: i64, out: &mut BTreeMap<(i64, i64), f64>) {
        let v = (lv.0 + rv.0, lv.1 + rv.1);
        if v.0.abs().max(v.1.abs()) > h {
            return;
        }
        let w = mul(l, r);
        out.insert(v, tr(&w));
        rec(l, lv, &w, v, h, out);
        rec(&w, v, r, rv, h, out);
    }
    let mut out = BTreeMap::new();
    out.insert((0, 1), tr(a));
    out.insert((1, 0), tr(b));
    rec(b, (1, 0), a, (0, 1), h, &mut out);
    rec(b, (1, 0), &inv(a), (0, -1), h, &mut out);
    out
}

pub fn length_of_trace(t: f64) -> f64 {
    2.0 * (t.abs() / 2.0).acosh()
}

/// Slope lengths by the matrix oracle.
pub fn oracle_lengths(l: f64, tau: f64, b: f64, h: i64) -> BTreeMap<(i64, i64), f64> {
    let (a, bm) = generators(l, tau, b);
    word_traces(&a, &bm, h).into_iter().map(|(v, t)| (v, length_of_trace(t))).collect()
}

/// Runs the binary; returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, Vec<u8>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_horolab")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout, String::from_utf8_lossy(&out.stderr).into_owned())
}

/// Every file under `dir`, by name.
pub fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

/// One command per CLI entry point, at sizes that run in seconds.
pub const DETERMINISM_COMMANDS: &[&[&str]] = &[
    &["curves", "enumerate", "--point", "1.3,0.4", "--L", "12"],
    &["curves", "count", "--L", "60"],
    &["volumes", "eval", "--surface", "1,1", "--curve", "nonsep", "--L", "3"],
    &["mass", "horoball", "--L", "5"],
    &["mass", "horosphere", "--surface", "0,4", "--curve", "sep", "--L", "5"],
    &["sample", "horoball", "--L", "10", "--samples", "2000", "--seed", "3"],
    &["sample", "horosphere", "--L", "10", "--samples", "2000", "--seed", "3"],
    &["sample", "target", "--samples", "500", "--seed", "3"],
    &["experiment", "run", "counting", "--seed", "7", "--params", r#"{"schedule":[25,50],"b_samples":2000}"#],
    &["experiment", "run", "equidistribution", "--params", r#"{"sample_count":500,"target_count":500}"#],
    &["experiment", "run", "mirzakhani-bound", "--params", r#"{"l_grid":[10,20],"eps_grid":[0.05,0.1],"depth":6}"#],
    &["experiment", "run", "twist-recurrence", "--params", r#"{"points":30,"pilot_points":10,"grid":50,"thin_checks":3}"#],
    &["experiment", "run", "thin-volume", "--params", r#"{"samples":5000,"boundary_lengths":[4]}"#],
    &["oracle", "mass-consistency", "--params", r#"{"samples":20000,"l_values":[3,6]}"#],
];

/// Runs every determinism command with `--threads 1` and `--threads n`, both to
/// stdout and to an output directory; returns the commands whose bytes differ.
pub fn determinism_mismatches(n: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for cmd in DETERMINISM_COMMANDS {
        let mut outputs = Vec::new();
        for threads in [1, n] {
            let dir = tempfile::tempdir().unwrap();
            let t = threads.to_string();
            let mut args: Vec<&str> = cmd.to_vec();
            args.extend(["--threads", &t]);
            let (code, stdout, err) = run_cli(&args);
            let d = dir.path().to_string_lossy().into_owned();
            let mut with_out = args.clone();
            with_out.extend(["--out", &d]);
            let (code2, _, err2) = run_cli(&with_out);
            if code != 0 || code2 != 0 {
                bad.push(format!("{} (exit {code}/{code2}: {err}{err2})", cmd.join(" ")));
            }
            outputs.push((stdout, read_dir_bytes(dir.path())));
        }
        if outputs[0] != outputs[1] || outputs[0].1.is_empty() {
            bad.push(cmd.join(" "));
        }
    }
    bad
}

/// WP measure on `{ℓ ∈ [a, b], 0 ≤ τ < ℓ}` (a fundamental domain for the
/// twist along the FN curve), by rejection from the enclosing box.
pub fn cell(seed: u64, n: usize) -> Vec<FNPoint> {
    let cfg = SamplerConfig::new(seed, 2 * n);
    let pts = sample_wp_cell(SurfaceSig::torus(), &[0.0], &[(0.5, 3.0)], &[(0.0, 3.0)], &cfg).unwrap();
    let kept: Vec<FNPoint> = pts.into_iter().filter(|x| x.twist_coord() < x.length()).take(n).collect();
    assert_eq!(kept.len(), n);
    kept
}

pub fn reduce(x: &FNPoint) -> FNPoint {
    let mut y = x.clone();
    y.twists[0] = x.twist_coord().rem_euclid(x.length());
    y
}
