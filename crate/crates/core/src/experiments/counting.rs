//! Growth of the number of simple closed geodesics of the torus curve type,
//! compared with the Mirzakhani-function prediction.

use serde::{Deserialize, Serialize};

use super::report::{Estimate, ExperimentReport, Table};
use super::require;
use crate::counting::{count_s_with, mirzakhani_function, DEFAULT_CAP};
use crate::error::Result;
use crate::exec::Exec;
use crate::geometry::{modular_length, FNPoint};
use crate::measures::{estimate_bgn, ModuliSurface, SamplerConfig};
use crate::topology::MultiCurveConfig;
use crate::volumes::{asymptotic_mass_limit, MassKind, MassQuery, VolumeTable, WeightFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountingParams {
    /// `(ℓ, τ)` of the cusped torus.
    pub point: (f64, f64),
    pub schedule: Vec<f64>,
    pub b1: f64,
    /// Samples for the `b` estimate.
    pub b_samples: usize,
    pub seed: u64,
    pub drift_max: f64,
    /// Allowance on top of 3σ for the prediction ratio.
    pub systematic: f64,
}

impl Default for CountingParams {
    fn default() -> Self {
        CountingParams {
            point: (modular_length(), 0.0),
            schedule: vec![25.0, 50.0, 100.0, 200.0, 400.0],
            b1: 1.0,
            b_samples: 20_000,
            seed: 7,
            drift_max: 0.03,
            systematic: 0.10,
        }
    }
}

pub fn run_counting(p: &CountingParams, exec: Exec) -> Result<ExperimentReport> {
    require(p.schedule.len() >= 2 && p.schedule.iter().all(|l| *l > 0.0), "need at least two positive L")?;
    require(p.b1 > 0.0, "b1 must be positive")?;
    let mut report = ExperimentReport::new("counting", p, vec![p.seed]);
    let x = FNPoint::torus(p.point.0, p.point.1)?;
    let config = MultiCurveConfig::torus_curve();
    let mut t = Table::new("counts", &["L", "count", "normalized"]);
    let mut normalized = Vec::new();
    for &l in &p.schedule {
        let c = count_s_with(&x, &config, &[p.b1], l, DEFAULT_CAP, exec)?;
        t.push(vec![l, c.count as f64, c.normalized]);
        normalized.push(c.normalized);
    }
    report.tables.push(t);
    let n = normalized.len();
    let drift = (normalized[n - 1] - normalized[n - 2]).abs() / normalized[n - 1];
    report.check(
        "normalized_drift",
        drift,
        format!("drift between the last two L < {}", p.drift_max),
        drift < p.drift_max,
    );

    // Scaling of the count box: b₁ = 2 at L is b₁ = 1 at 2L.
    let l0 = p.schedule[0];
    let twice = count_s_with(&x, &config, &[2.0 * p.b1], l0, DEFAULT_CAP, exec)?.count;
    let double = count_s_with(&x, &config, &[p.b1], 2.0 * l0, DEFAULT_CAP, exec)?.count;
    report.check("b1_scaling", (twice as f64) - (double as f64), "counts equal".into(), twice == double);

    let b_x = mirzakhani_function(&x)?;
    let cfg = SamplerConfig::new(p.seed, p.b_samples).with_exec(exec);
    let (b, b_se) = estimate_bgn(ModuliSurface::Torus, &cfg)?;
    let q = MassQuery::new(config, WeightFunction::box_indicator(&[p.b1]), 1.0)?;
    let w_int = asymptotic_mass_limit(&q, MassKind::Horoball, VolumeTable::shipped())?;
    let prediction = b_x / b * w_int;
    let ratio = normalized[n - 1] / prediction;
    let ratio_se = ratio * b_se / b;
    report.estimates.extend([
        Estimate::exact("mirzakhani_function", b_x),
        Estimate::with_stderr("b", b, b_se),
        Estimate::exact("w_integral", w_int),
        Estimate::with_stderr("prediction", prediction, prediction * b_se / b),
        Estimate::with_stderr("ratio", ratio, ratio_se),
    ]);
    let tol = 3.0 * ratio_se + p.systematic;
    report.check(
        "prediction_ratio",
        ratio,
        format!("|ratio − 1| ≤ 3σ + {} = {tol:.4}", p.systematic),
        (ratio - 1.0).abs() <= tol,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_schedule_is_consistent() {
        let p = CountingParams { schedule: vec![50.0, 100.0], b_samples: 2000, drift_max: 0.1, ..Default::default() };
        let r = run_counting(&p, Exec::default()).unwrap();
        assert!(r.criterion("b1_scaling").unwrap().pass);
        assert!(r.criterion("prediction_ratio").unwrap().pass, "{:?}", r.criteria);
    }
}
