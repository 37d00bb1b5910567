//! Horoball and horosphere samples against the Mirzakhani-weighted target.
//!
//! Statistics are mapping-class invariant: the three lengths of the shortest
//! Farey triangle, `B(X)`, and on the bundle the intersection of the
//! normalized lamination with the systole.

use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::report::{Estimate, ExperimentReport, Table};
use super::require;
use super::stats::weighted_ks;
use crate::counting::{enumerate_simple_curves, lamination_length, mirzakhani_function, LaminationCoord};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{model, systole, FNPoint};
use crate::measures::{
    fd_chart, sample_horoball, sample_horosphere, sample_target_mirzakhani, substream, FdConvention, ModuliSurface,
    SamplerConfig,
};
use crate::topology::MultiCurveConfig;
use crate::volumes::WeightFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Horoball,
    Horosphere,
}

impl SamplerKind {
    fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Horoball => "horoball",
            SamplerKind::Horosphere => "horosphere",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquidistributionParams {
    pub kinds: Vec<SamplerKind>,
    pub schedule: Vec<f64>,
    pub sample_count: usize,
    pub target_count: usize,
    /// Shared by every level, so the schedule uses common random numbers.
    pub seed: u64,
    pub target_seed: u64,
    pub ks_final_max: f64,
}

impl Default for EquidistributionParams {
    fn default() -> Self {
        EquidistributionParams {
            kinds: vec![SamplerKind::Horoball, SamplerKind::Horosphere],
            schedule: vec![10.0, 30.0, 100.0],
            sample_count: 10_000,
            target_count: 10_000,
            seed: 101,
            target_seed: 102,
            ks_final_max: 0.05,
        }
    }
}

const STATS: [&str; 5] = ["systole", "second", "third", "mirzakhani", "bundle"];

/// Moduli statistics and the systole slope's intersection with the FN curve.
fn point_stats(x: &FNPoint) -> Result<[f64; 5]> {
    let (sys_slope, sys) = systole(x)?;
    let (l, tau) = fd_chart(x, FdConvention::HalfCell)?;
    let xf = FNPoint::torus(l, tau)?;
    let m = model(&xf)?;
    let mut lens = [l, m.length_from_trace(m.triple.y)?, m.length_from_trace(m.triple.z)?];
    lens.sort_by(f64::total_cmp);
    let b = mirzakhani_function(&xf)?;
    // The lamination is γ/ℓ_γ with γ the FN curve of the sample's marking.
    let bundle = sys_slope.p.unsigned_abs() as f64 / x.length();
    Ok([sys, lens[1], lens[2], b, bundle])
}

/// Bundle statistic for a target point in its domain chart (systole = FN):
/// a direction drawn from the cone measure of the unit length ball.
fn target_bundle(xf: &FNPoint, i: usize, seed: u64) -> Result<f64> {
    let third = {
        let m = model(xf)?;
        m.length_from_trace(m.triple.z)?.max(m.length_from_trace(m.triple.y)?)
    };
    let rmax = enumerate_simple_curves(xf, 4.0 * third + 1.0)?
        .iter()
        .map(|(s, len)| ((s.p * s.p + s.q * s.q) as f64).sqrt() / len)
        .fold(0.0, f64::max)
        * 1.05;
    let mut rng = substream(seed, i as u64);
    for _ in 0..100_000 {
        let th = std::f64::consts::PI * rng.random::<f64>();
        let (s, c) = th.sin_cos();
        let r = 1.0 / lamination_length(xf, LaminationCoord::new(c, s)?)?;
        if r > rmax {
            return Err(Error::NumericalInstability("unit ball exceeds its radius bound".into()));
        }
        if rng.random::<f64>() * rmax * rmax < r * r {
            return Ok(s.abs() * r);
        }
    }
    Err(Error::RejectionCapExceeded(100_000))
}

fn stats_of(points: &[FNPoint], exec: Exec) -> Result<Vec<[f64; 5]>> {
    exec.map_slice(points, point_stats).into_iter().collect()
}

fn draw(kind: SamplerKind, l: f64, n: usize, seed: u64, exec: Exec) -> Result<Vec<FNPoint>> {
    let config = MultiCurveConfig::torus_curve();
    let f = WeightFunction::box_indicator(&[1.0]);
    let cfg = SamplerConfig::new(seed, n).with_exec(exec);
    let s = match kind {
        SamplerKind::Horoball => sample_horoball(&config, &f, l, &cfg)?,
        SamplerKind::Horosphere => sample_horosphere(&config, &[Rational64::from_integer(1)], &f, l, &cfg)?,
    };
    Ok(s.into_iter().map(|s| s.point).collect())
}

fn column(stats: &[[f64; 5]], j: usize, weights: Option<&[f64]>) -> Vec<(f64, f64)> {
    stats.iter().enumerate().map(|(i, s)| (s[j], weights.map_or(1.0, |w| w[i]))).collect()
}

pub fn run_equidistribution(p: &EquidistributionParams, exec: Exec) -> Result<ExperimentReport> {
    require(!p.kinds.is_empty(), "no sampler kinds")?;
    require(p.schedule.len() >= 2 && p.schedule.iter().all(|l| *l > 0.0), "need at least two positive L")?;
    require(p.sample_count > 0 && p.target_count > 0, "sample counts must be positive")?;
    let mut report = ExperimentReport::new("equidistribution", p, vec![p.seed, p.target_seed]);

    let tcfg = SamplerConfig::new(p.target_seed, p.target_count).with_exec(exec);
    let target = sample_target_mirzakhani(ModuliSurface::Torus, &tcfg)?;
    let tpoints: Vec<FNPoint> = target.iter().map(|s| s.point.clone()).collect();
    let tw: Vec<f64> = target.iter().map(|s| s.weight).collect();
    let mut tstats = stats_of(&tpoints, exec)?;
    let bundles = exec.map_range(tpoints.len(), |i| target_bundle(&tpoints[i], i, p.target_seed.wrapping_add(1)));
    for (s, b) in tstats.iter_mut().zip(bundles) {
        s[4] = b?;
    }
    let ess = {
        let s: f64 = tw.iter().sum();
        s * s / tw.iter().map(|w| w * w).sum::<f64>()
    };
    report.estimates.push(Estimate::exact("target_ess", ess));

    let mut cols = vec!["kind", "L"];
    cols.extend(STATS.iter().map(|s| *s));
    let mut t = Table::new("ks", &cols);
    for (ki, kind) in p.kinds.iter().enumerate() {
        let mut series: Vec<Vec<f64>> = vec![Vec::new(); STATS.len()];
        for &l in &p.schedule {
            let pts = draw(*kind, l, p.sample_count, p.seed, exec)?;
            let st = stats_of(&pts, exec)?;
            let mut row = vec![ki as f64, l];
            for j in 0..STATS.len() {
                let d = weighted_ks(&column(&st, j, None), &column(&tstats, j, Some(&tw)))?;
                series[j].push(d);
                row.push(d);
            }
            t.push(row);
            if l == p.schedule[0] {
                // Two independent sample sets at the same level.
                let other = stats_of(&draw(*kind, l, p.sample_count, p.seed.wrapping_add(1000), exec)?, exec)?;
                let d = weighted_ks(&column(&st, 0, None), &column(&other, 0, None))?;
                report.estimates.push(Estimate::exact(&format!("{}_self_ks_systole", kind.as_str()), d));
                report.check(
                    &format!("{}_self_baseline", kind.as_str()),
                    d,
                    "self distance below target distance at the first level".into(),
                    d < series[0][0],
                );
            }
        }
        let checked: &[usize] = match kind {
            SamplerKind::Horoball => &[0, 4],
            SamplerKind::Horosphere => &[0],
        };
        for &j in checked {
            let s = &series[j];
            let last = s[s.len() - 1];
            let decreasing = s.windows(2).all(|w| w[1] < w[0]);
            report.check(
                &format!("{}_{}_final", kind.as_str(), STATS[j]),
                last,
                format!("KS < {} at the last level", p.ks_final_max),
                last < p.ks_final_max,
            );
            report.check(
                &format!("{}_{}_decreasing", kind.as_str(), STATS[j]),
                decreasing as u8 as f64,
                "strictly decreasing along the schedule".into(),
                decreasing,
            );
        }
    }
    report.tables.push(t);
    Ok(report)
}
