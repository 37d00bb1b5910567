//! Horosphere mass of small Thurston balls: scaling in the radius and in `L`,
//! and the rescaling identity `η^1_{λ/L} = L·η^L_λ`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Table};
use super::require;
use super::stats::loglog_fit;
use crate::error::Result;
use crate::exec::Exec;
use crate::geometry::FNPoint;
use crate::measures::{estimate_horosphere_ball_mass, horosphere_center};
use crate::topology::MultiCurveConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundParams {
    /// Base point `(ℓ, τ)`; the ball centers are its projections to the horospheres.
    pub center: (f64, f64),
    pub a: i64,
    pub eps_grid: Vec<f64>,
    /// Integer levels, so that `a/L` is exact.
    pub l_grid: Vec<i64>,
    pub eps_for_l_fit: f64,
    pub l_for_eps_fit: i64,
    pub depth: u32,
    pub eps_exponent_min: f64,
    pub l_exponent_range: (f64, f64),
    pub rescaling_tol: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            center: (1.1, 0.3),
            a: 1,
            eps_grid: vec![0.02, 0.03, 0.05, 0.08, 0.12, 0.2],
            l_grid: vec![10, 20, 40, 80],
            eps_for_l_fit: 0.1,
            l_for_eps_fit: 20,
            depth: 10,
            eps_exponent_min: 0.85,
            l_exponent_range: (-1.2, -0.8),
            rescaling_tol: 1e-6,
        }
    }
}

pub fn run_mirzakhani_bound(p: &BoundParams, exec: Exec) -> Result<ExperimentReport> {
    require(p.a > 0 && p.l_grid.iter().all(|l| *l > 0), "a and L must be positive")?;
    require(p.eps_grid.len() >= 2 && p.l_grid.len() >= 2, "need two radii and two levels")?;
    let mut report = ExperimentReport::new("mirzakhani-bound", p, vec![]);
    let config = MultiCurveConfig::torus_curve();
    let a = Rational64::from_integer(p.a);
    let x0 = FNPoint::torus(p.center.0, p.center.1)?;
    let center = |l: i64| horosphere_center(&x0, a, l as f64).map(|c| c.0);

    let xe = center(p.l_for_eps_fit)?;
    let by_eps = exec.map_slice(&p.eps_grid, |&eps| {
        estimate_horosphere_ball_mass(&config, a, p.l_for_eps_fit as f64, &xe, eps, p.depth)
    });
    let mut t = Table::new("by_eps", &["eps", "mass", "inner", "outer"]);
    let mut masses = Vec::new();
    for (eps, m) in p.eps_grid.iter().zip(by_eps) {
        let m = m?;
        t.push(vec![*eps, m.value, m.bracket.0, m.bracket.1]);
        masses.push(m.value);
    }
    report.tables.push(t);
    let fe = loglog_fit(&p.eps_grid, &masses)?;
    report.check(
        "eps_exponent",
        fe.slope,
        format!("slope ≥ {}", p.eps_exponent_min),
        fe.slope >= p.eps_exponent_min,
    );
    report.fit("log_mass_vs_log_eps", fe);

    let by_l = exec.map_slice(&p.l_grid, |&l| -> Result<(f64, f64, f64, f64)> {
        let x = center(l)?;
        let m = estimate_horosphere_ball_mass(&config, a, l as f64, &x, p.eps_for_l_fit, p.depth)?;
        let m1 = estimate_horosphere_ball_mass(&config, a / l, 1.0, &x, p.eps_for_l_fit, p.depth)?;
        Ok((m.value, m.bracket.0, m.bracket.1, m1.value))
    });
    let mut t = Table::new("by_L", &["L", "mass", "inner", "outer", "mass_rescaled", "ratio"]);
    let mut masses = Vec::new();
    let mut worst: f64 = 0.0;
    for (l, r) in p.l_grid.iter().zip(by_l) {
        let (m, lo, hi, m1) = r?;
        let ratio = m1 / m;
        worst = worst.max((ratio / *l as f64 - 1.0).abs());
        t.push(vec![*l as f64, m, lo, hi, m1, ratio]);
        masses.push(m);
    }
    report.tables.push(t);
    let ls: Vec<f64> = p.l_grid.iter().map(|l| *l as f64).collect();
    let fl = loglog_fit(&ls, &masses)?;
    let (lo, hi) = p.l_exponent_range;
    report.check("l_exponent", fl.slope, format!("slope in [{lo}, {hi}]"), (lo..=hi).contains(&fl.slope));
    report.fit("log_mass_vs_log_L", fl);
    report.check(
        "rescaling_identity",
        worst,
        format!("max |η¹/(L·η^L) − 1| ≤ {}", p.rescaling_tol),
        worst <= p.rescaling_tol,
    );
    Ok(report)
}
