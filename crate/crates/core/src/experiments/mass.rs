//! Closed-form horoball masses against Monte Carlo Weil–Petersson masses,
//! which pins the domain convention and the symmetry constants.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Estimate, ExperimentReport, Table};
use super::stats::loglog_fit;
use super::require;
use crate::counting::{enumerate_simple_curves_with, orbit_filter, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::measures::{fd_importance_draws, mean_stderr, FdConvention, ModuliSurface, SamplerConfig};
use crate::topology::{symmetry_constants, MultiCurveConfig, SurfaceSig};
use crate::volumes::{horoball_mass, MassQuery, VolumeTable, WeightFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MassParams {
    pub l_values: Vec<f64>,
    /// `f` is the indicator of `[0, a]`.
    pub a: f64,
    pub samples: usize,
    pub seed: u64,
    /// Agreement tolerance in standard errors.
    pub sigma_tol: f64,
    pub exponent_tol: f64,
    /// Candidate orders of the pants kernel.
    pub pants_kernel_orders: Vec<u32>,
}

impl Default for MassParams {
    fn default() -> Self {
        MassParams {
            l_values: vec![5.0, 10.0, 20.0],
            a: 1.0,
            samples: 1_000_000,
            seed: 2024,
            sigma_tol: 3.0,
            exponent_tol: 0.1,
            pants_kernel_orders: vec![1, 2],
        }
    }
}

/// A candidate normalization: domain convention plus the constants it implies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
struct Candidate {
    fd_convention: FdConvention,
    pants_kernel_order: u32,
    s11_sigma: u32,
    s11_stab_index: u32,
    s04_sigma: u32,
    s04_stab_index: u32,
}

impl Candidate {
    fn new(conv: FdConvention, kp: u32) -> Self {
        // σ counts the kernel of the restriction to the pieces; the torus curve
        // has one pants piece and a reversing involution, the sphere curve two pieces.
        Candidate {
            fd_convention: conv,
            pants_kernel_order: kp,
            s11_sigma: kp,
            s11_stab_index: 2,
            s04_sigma: kp * kp,
            s04_stab_index: 1,
        }
    }

    fn constant(&self, s: ModuliSurface) -> f64 {
        match s {
            ModuliSurface::Sphere4 => self.s04_sigma as f64 / self.s04_stab_index as f64,
            _ => self.s11_sigma as f64 / self.s11_stab_index as f64,
        }
    }
}

fn config_for(s: ModuliSurface) -> Result<MultiCurveConfig> {
    match s {
        ModuliSurface::Sphere4 => MultiCurveConfig::new(SurfaceSig::sphere4(), "sep", None),
        _ => Ok(MultiCurveConfig::torus_curve()),
    }
}

/// Monte Carlo `∫_FD #{α ∈ Mod·γ : ℓ_α ≤ aL} dμ_wp` for each `L`, per convention.
///
/// Full-cell proposals serve both conventions: the half cell is the same draw
/// restricted to `τ < ℓ/2` (its proposal density is twice as large on half the range).
fn mc_masses(s: ModuliSurface, p: &MassParams, exec: Exec) -> Result<Vec<(FdConvention, Vec<(f64, f64)>)>> {
    let config = config_for(s)?;
    let cfg = SamplerConfig::new(p.seed, p.samples).with_exec(exec).with_convention(FdConvention::FullCell);
    let draws = fd_importance_draws(s, &cfg)?;
    let lmax = p.a * p.l_values.iter().cloned().fold(0.0, f64::max);
    let counts: Vec<Result<(Vec<f64>, bool)>> = exec.map_slice(&draws, |d| {
        let Some(x) = &d.point else { return Ok((vec![0.0; p.l_values.len()], false)) };
        let keep = orbit_filter(x, &config)?;
        let curves = enumerate_simple_curves_with(x, lmax, DEFAULT_CAP, Exec::Sequential)?;
        let c = p
            .l_values
            .iter()
            .map(|l| curves.iter().filter(|(sl, len)| *len <= p.a * l && keep(*sl)).count() as f64 * d.weight)
            .collect();
        // For the sphere both conventions coincide; the flag only matters on the torus.
        let half = x.twist_coord() < x.length() / 2.0;
        Ok((c, half))
    });
    let counts = counts.into_iter().collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for conv in [FdConvention::FullCell, FdConvention::HalfCell] {
        let per_l = (0..p.l_values.len())
            .map(|j| {
                let vals: Vec<f64> = counts
                    .iter()
                    .map(|(c, half)| match (conv, s) {
                        (FdConvention::HalfCell, ModuliSurface::Torus) if !half => 0.0,
                        _ => c[j],
                    })
                    .collect();
                mean_stderr(&vals)
            })
            .collect();
        out.push((conv, per_l));
    }
    Ok(out)
}

pub fn run_mass_consistency(p: &MassParams, exec: Exec) -> Result<ExperimentReport> {
    require(p.l_values.len() >= 2 && p.l_values.iter().all(|l| *l > 0.0), "need at least two positive L")?;
    require(p.a > 0.0 && p.samples >= 2, "a must be positive and samples ≥ 2")?;
    require(!p.pants_kernel_orders.is_empty(), "no candidate kernel orders")?;
    let mut report = ExperimentReport::new("mass-consistency", p, vec![p.seed]);
    let table = VolumeTable::shipped();
    let surfaces = [ModuliSurface::Torus, ModuliSurface::Sphere4];
    let mut candidates = Vec::new();
    for conv in [FdConvention::FullCell, FdConvention::HalfCell] {
        for &kp in &p.pants_kernel_orders {
            candidates.push(Candidate::new(conv, kp));
        }
    }
    let mut ok = vec![true; candidates.len()];
    let mut t = Table::new(
        "masses",
        &["surface", "L", "convention", "mc", "mc_stderr", "closed_form_shipped", "candidate", "closed_form", "z"],
    );
    let mut s11_pinned: Vec<(FdConvention, Vec<(f64, f64)>)> = Vec::new();
    for (si, s) in surfaces.iter().enumerate() {
        let config = config_for(*s)?;
        let (sigma, stab) = symmetry_constants(&config)?;
        let shipped_c = *sigma.numer() as f64 / *sigma.denom() as f64 / stab as f64;
        let mc = mc_masses(*s, p, exec)?;
        if *s == ModuliSurface::Torus {
            s11_pinned = mc.clone();
        }
        for (j, l) in p.l_values.iter().enumerate() {
            let q = MassQuery::new(config.clone(), WeightFunction::box_indicator(&[p.a]), *l)?;
            let shipped = horoball_mass(&q, table)?;
            for (ci, c) in candidates.iter().enumerate() {
                let (_, per_l) = mc.iter().find(|(conv, _)| *conv == c.fd_convention).expect("both conventions");
                let (m, se) = per_l[j];
                let cf = shipped * c.constant(*s) / shipped_c;
                let z = (cf - m).abs() / se;
                ok[ci] &= z <= p.sigma_tol;
                let conv = if c.fd_convention == FdConvention::HalfCell { 0.0 } else { 1.0 };
                t.push(vec![si as f64, *l, conv, m, se, shipped, ci as f64, cf, z]);
            }
        }
    }
    report.tables.push(t);
    let matching: Vec<Candidate> = candidates.iter().zip(&ok).filter(|(_, m)| **m).map(|(c, _)| *c).collect();
    report.findings = json!({
        "surface_codes": {"0": "S_{1,1}", "1": "S_{0,4}"},
        "convention_codes": {"0": "half_cell", "1": "full_cell"},
        "candidates": candidates,
        "matching": matching,
    });
    report.check(
        "unique_consistent_tuple",
        matching.len() as f64,
        format!("exactly one candidate within {}σ for every L and both surfaces", p.sigma_tol),
        matching.len() == 1,
    );
    let Some(chosen) = matching.first().copied() else {
        return Err(Error::NoConsistentConvention(format!(
            "none of {} candidates matches within {}σ",
            candidates.len(),
            p.sigma_tol
        )));
    };
    // The frozen table constants and default convention must be the chosen ones.
    let (s11_sigma, s11_stab) = symmetry_constants(&MultiCurveConfig::torus_curve())?;
    let (s04_sigma, s04_stab) = symmetry_constants(&config_for(ModuliSurface::Sphere4)?)?;
    let frozen = chosen.fd_convention == FdConvention::default()
        && s11_sigma == Rational64::from_integer(chosen.s11_sigma as i64)
        && s11_stab == chosen.s11_stab_index
        && s04_sigma == Rational64::from_integer(chosen.s04_sigma as i64)
        && s04_stab == chosen.s04_stab_index;
    report.check("frozen_constants_agree", frozen as u8 as f64, "shipped table and default convention".into(), frozen);

    let (_, per_l) = s11_pinned.iter().find(|(c, _)| *c == chosen.fd_convention).expect("present");
    let fit = loglog_fit(&p.l_values, &per_l.iter().map(|m| m.0).collect::<Vec<_>>())?;
    report.check(
        "mc_mass_exponent",
        fit.slope,
        format!("|slope − 2| ≤ {}", p.exponent_tol),
        (fit.slope - 2.0).abs() <= p.exponent_tol,
    );
    report.fit("s11_mc_mass_vs_L", fit);
    for (l, (m, se)) in p.l_values.iter().zip(per_l) {
        report.estimates.push(Estimate::with_stderr(&format!("s11_mc_mass_L{l}"), *m, *se));
    }
    Ok(report)
}
