//! Weil–Petersson volume of the thin part of the one-holed torus moduli space.

use serde::{Deserialize, Serialize};

use super::report::{Estimate, ExperimentReport, Table};
use super::require;
use super::stats::loglog_fit;
use crate::error::Result;
use crate::exec::Exec;
use crate::geometry::systole;
use crate::measures::{fd_importance_draws, mean_stderr, FdConvention, ModuliSurface, SamplerConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThinParams {
    pub boundary_lengths: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub exponent_range: (f64, f64),
}

impl Default for ThinParams {
    fn default() -> Self {
        ThinParams {
            boundary_lengths: vec![4.0, 8.0],
            eps_grid: vec![0.02, 0.04, 0.08, 0.16, 0.32],
            samples: 400_000,
            seed: 17,
            exponent_range: (1.7, 2.3),
        }
    }
}

pub fn run_thin_volume(p: &ThinParams, exec: Exec) -> Result<ExperimentReport> {
    require(p.eps_grid.len() >= 2 && p.eps_grid.iter().all(|e| *e > 0.0), "need two positive radii")?;
    require(!p.boundary_lengths.is_empty() && p.boundary_lengths.iter().all(|b| *b >= 0.0), "bad boundary lengths")?;
    let mut report = ExperimentReport::new("thin-volume", p, vec![p.seed]);
    let mut eps = p.eps_grid.clone();
    eps.sort_by(f64::total_cmp);
    let mut t = Table::new("thin", &["b", "eps", "volume", "volume_stderr", "half_cell_exact"]);
    for &b in &p.boundary_lengths {
        let cfg = SamplerConfig::new(p.seed, p.samples).with_exec(exec).with_convention(FdConvention::HalfCell);
        let draws = fd_importance_draws(ModuliSurface::HoledTorus(b), &cfg)?;
        let sys = exec.map_slice(&draws, |d| match &d.point {
            Some(x) => systole(x).map(|s| (s.1, d.weight)),
            None => Ok((f64::INFINITY, 0.0)),
        });
        let sys = sys.into_iter().collect::<Result<Vec<_>>>()?;
        let mut vols = Vec::new();
        let mut monotone = true;
        for &e in &eps {
            let vals: Vec<f64> = sys.iter().map(|(s, w)| if *s < e { *w } else { 0.0 }).collect();
            let (v, se) = mean_stderr(&vals);
            monotone &= vols.last().is_none_or(|last: &f64| v >= *last);
            // Every FN length below ε lies in the domain, with twists in [0, ℓ/2).
            t.push(vec![b, e, v, se, e * e / 4.0]);
            vols.push(v);
        }
        let fit = loglog_fit(&eps, &vols)?;
        let (lo, hi) = p.exponent_range;
        report.check(
            &format!("exponent_b{b}"),
            fit.slope,
            format!("slope in [{lo}, {hi}]"),
            (lo..=hi).contains(&fit.slope),
        );
        report.check(&format!("monotone_b{b}"), monotone as u8 as f64, "non-decreasing in ε".into(), monotone);
        report.fit(&format!("log_volume_vs_log_eps_b{b}"), fit);
        report.estimates.push(Estimate::exact(&format!("fit_constant_b{b}"), fit.intercept.exp()));
    }
    report.tables.push(t);
    Ok(report)
}
