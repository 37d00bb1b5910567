//! Recurrence of twist tori to the thick part.

use serde::{Deserialize, Serialize};

use super::report::{Estimate, ExperimentReport, Table};
use super::require;
use crate::error::Result;
use crate::exec::Exec;
use crate::geometry::{earthquake_unit, systole, twist, FNPoint, Slope};
use crate::measures::{sample_horoball, SamplerConfig};
use crate::topology::MultiCurveConfig;
use crate::volumes::WeightFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwistParams {
    pub points: usize,
    pub pilot_points: usize,
    /// Level of the horoball the points are drawn from.
    pub level: f64,
    /// Candidate thickness parameters, tried from largest to smallest.
    pub eps_grid: Vec<f64>,
    pub delta: f64,
    /// Twist grid size per torus.
    pub grid: usize,
    /// Horizon of the unit-speed earthquake average.
    pub horizon: f64,
    /// Points re-run with a thin curve for the persistence check.
    pub thin_checks: usize,
    pub seed: u64,
}

impl Default for TwistParams {
    fn default() -> Self {
        TwistParams {
            points: 1000,
            pilot_points: 100,
            level: 20.0,
            eps_grid: vec![0.5, 0.3, 0.2, 0.1, 0.05, 0.02],
            delta: 0.1,
            grid: 1000,
            horizon: 200.0,
            thin_checks: 50,
            seed: 31,
        }
    }
}

/// Systole along `t ↦ path(t)` at the grid midpoints of `[0, span)`.
fn sweep(grid: usize, span: f64, path: impl Fn(f64) -> Result<FNPoint>) -> Result<Vec<f64>> {
    (0..grid).map(|j| Ok(systole(&path((j as f64 + 0.5) * span / grid as f64)?)?.1)).collect()
}

fn fraction_below(sys: &[f64], eps: f64) -> f64 {
    sys.iter().filter(|s| **s < eps).count() as f64 / sys.len() as f64
}

fn draw(p: &TwistParams, seed: u64, n: usize, exec: Exec) -> Result<Vec<FNPoint>> {
    let cfg = SamplerConfig::new(seed, n).with_exec(exec);
    let f = WeightFunction::box_indicator(&[1.0]);
    Ok(sample_horoball(&MultiCurveConfig::torus_curve(), &f, p.level, &cfg)?.into_iter().map(|s| s.point).collect())
}

pub fn run_twist_recurrence(p: &TwistParams, exec: Exec) -> Result<ExperimentReport> {
    require(p.points > 0 && p.pilot_points > 0 && p.grid > 0, "point and grid counts must be positive")?;
    require(!p.eps_grid.is_empty() && p.eps_grid.iter().all(|e| *e > 0.0), "eps grid must be positive")?;
    require(p.delta > 0.0 && p.delta < 1.0 && p.horizon > 0.0, "delta in (0,1) and horizon > 0")?;
    let mut report = ExperimentReport::new("twist-recurrence", p, vec![p.seed, p.seed.wrapping_add(1)]);
    let mut eps_grid = p.eps_grid.clone();
    eps_grid.sort_by(|a, b| b.total_cmp(a));

    // Pilot: the largest ε whose worst failure fraction is below δ/2.
    let pilot = draw(p, p.seed.wrapping_add(1), p.pilot_points, exec)?;
    let sweeps = exec.map_slice(&pilot, |x| sweep(p.grid, x.length(), |t| Ok(twist(x, 0, t))));
    let sweeps = sweeps.into_iter().collect::<Result<Vec<_>>>()?;
    let mut t = Table::new("pilot", &["eps", "max_failure", "mean_failure"]);
    let mut chosen = None;
    let mut last_max = f64::INFINITY;
    let mut monotone = true;
    for &eps in &eps_grid {
        let fr: Vec<f64> = pilot
            .iter()
            .zip(&sweeps)
            .filter(|(x, _)| x.length() >= eps)
            .map(|(_, s)| fraction_below(s, eps))
            .collect();
        let max = fr.iter().cloned().fold(0.0, f64::max);
        let mean = if fr.is_empty() { 0.0 } else { fr.iter().sum::<f64>() / fr.len() as f64 };
        monotone &= max <= last_max;
        last_max = max;
        t.push(vec![eps, max, mean]);
        if chosen.is_none() && max < p.delta / 2.0 {
            chosen = Some(eps);
        }
    }
    report.tables.push(t);
    report.check("failure_monotone_in_eps", monotone as u8 as f64, "pilot failure non-increasing as ε shrinks".into(), monotone);
    let eps = chosen.unwrap_or(eps_grid[eps_grid.len() - 1]);
    report.estimates.push(Estimate::exact("eps", eps));

    let points = draw(p, p.seed, p.points, exec)?;
    let config = MultiCurveConfig::torus_curve();
    let rows = exec.map_slice(&points, |x| -> Result<(f64, f64, f64)> {
        if x.length() < eps {
            return Ok((x.length(), f64::NAN, f64::NAN));
        }
        let s = sweep(p.grid, x.length(), |t| Ok(twist(x, 0, t)))?;
        let e = sweep(p.grid, p.horizon, |t| earthquake_unit(x, &config, &[Slope::FN], t))?;
        Ok((x.length(), fraction_below(&s, eps), fraction_below(&e, eps)))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut t = Table::new("points", &["length", "twist_failure", "earthquake_failure"]);
    let (mut worst, mut worst_eq, mut sum) = (0.0f64, 0.0f64, 0.0);
    let mut used = 0;
    for r in &rows {
        t.push(vec![r.0, r.1, r.2]);
        if r.1.is_finite() {
            worst = worst.max(r.1);
            worst_eq = worst_eq.max(r.2);
            sum += r.1;
            used += 1;
        }
    }
    report.tables.push(t);
    report.estimates.push(Estimate::exact("mean_twist_failure", sum / used.max(1) as f64));
    report.estimates.push(Estimate::exact("max_earthquake_failure", worst_eq));
    report.check("max_twist_failure", worst, format!("< δ = {}", p.delta), worst < p.delta);

    // A Fenchel–Nielsen curve shorter than ε stays shorter along the whole torus.
    let thin = exec.map_slice(&points[..p.thin_checks.min(points.len())], |x| -> Result<f64> {
        let y = FNPoint::torus(eps / 2.0, x.twist_coord())?;
        let s = sweep(p.grid / 10 + 1, y.length(), |t| Ok(twist(&y, 0, t)))?;
        Ok(fraction_below(&s, eps))
    });
    let min_thin = thin.into_iter().collect::<Result<Vec<_>>>()?.into_iter().fold(1.0, f64::min);
    report.check("thin_curve_persists", min_thin, "every twist fails".into(), min_thin == 1.0);
    Ok(report)
}
