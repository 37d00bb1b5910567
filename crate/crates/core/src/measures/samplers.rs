use num_rational::Rational64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::fd::{importance_draw, uniform_draw, FdConvention, ModuliSurface};
use super::{substream, Provenance, SamplerConfig, SurfaceSample};
use crate::counting::mirzakhani_function;
use crate::error::{Error, Result};
use crate::geometry::FNPoint;
use crate::topology::{cut_surface, CutData, MultiCurveConfig, SurfaceSig};
use crate::volumes::{assemble_v, FastPoly, VolumeTable, WeightFunction};

/// Independent uniform samples in a Fenchel–Nielsen box: the WP measure on the cell.
pub fn sample_wp_cell(
    surface: SurfaceSig,
    boundary_lengths: &[f64],
    lengths: &[(f64, f64)],
    twists: &[(f64, f64)],
    cfg: &SamplerConfig,
) -> Result<Vec<FNPoint>> {
    cfg.validate()?;
    let bounded = |r: &[(f64, f64)]| r.iter().all(|(a, b)| a.is_finite() && b.is_finite() && a <= b);
    if !bounded(lengths) || !bounded(twists) {
        return Err(Error::InvalidInput("cell must be a bounded box".into()));
    }
    if lengths.iter().any(|(a, _)| *a < 0.0) {
        return Err(Error::InvalidInput("length range must be non-negative".into()));
    }
    cfg.exec
        .map_range(cfg.sample_count, |i| {
            let mut rng = substream(cfg.seed, i as u64);
            // 1 − U keeps zero-width-at-the-bottom ranges strictly positive.
            let l = lengths.iter().map(|(a, b)| b - (b - a) * rng.random::<f64>()).collect();
            let t = twists.iter().map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect();
            FNPoint::new(surface, l, t, boundary_lengths.to_vec())
        })
        .into_iter()
        .collect()
}

/// Uniform samples of the Weil–Petersson measure on the fundamental domain.
pub fn sample_moduli_fd(surface: ModuliSurface, cfg: &SamplerConfig) -> Result<Vec<SurfaceSample>> {
    cfg.validate()?;
    cfg.exec
        .map_range(cfg.sample_count, |i| {
            let mut rng = substream(cfg.seed, i as u64);
            let point = draw_fd(surface, cfg.fd_convention, cfg.rejection_cap, &mut rng)?;
            Ok(SurfaceSample { point, weight: 1.0, provenance: Provenance::ModuliFd })
        })
        .into_iter()
        .collect()
}

fn draw_fd(surface: ModuliSurface, conv: FdConvention, cap: u64, rng: &mut ChaCha8Rng) -> Result<FNPoint> {
    for _ in 0..cap {
        if let Some(x) = uniform_draw(surface, conv, rng)? {
            return Ok(x);
        }
    }
    Err(Error::RejectionCapExceeded(cap))
}

/// One importance proposal for domain integrals; `point` is `None` outside.
#[derive(Clone, Debug, PartialEq)]
pub struct FdDraw {
    pub point: Option<FNPoint>,
    pub weight: f64,
}

/// `cfg.sample_count` proposals with `ℓ` uniform below the largest systole and
/// `τ` uniform in its cell; `mean(weight·g·1_inside)` estimates `∫_FD g dμ_wp`.
pub fn fd_importance_draws(surface: ModuliSurface, cfg: &SamplerConfig) -> Result<Vec<FdDraw>> {
    cfg.validate()?;
    cfg.exec
        .map_range(cfg.sample_count, |i| {
            let mut rng = substream(cfg.seed, i as u64);
            Ok(match importance_draw(surface, cfg.fd_convention, &mut rng)? {
                Some((p, w)) => FdDraw { point: Some(p), weight: w },
                None => FdDraw { point: None, weight: 0.0 },
            })
        })
        .into_iter()
        .collect()
}

/// Domain samples weighted by the Mirzakhani function.
pub fn sample_target_mirzakhani(surface: ModuliSurface, cfg: &SamplerConfig) -> Result<Vec<SurfaceSample>> {
    let base = sample_moduli_fd(surface, cfg)?;
    cfg.exec
        .map_slice(&base, |s| {
            let b = mirzakhani_function(&s.point)?;
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::NumericalInstability(format!("Mirzakhani function {b}")));
            }
            Ok(SurfaceSample { point: s.point.clone(), weight: b, provenance: Provenance::Target })
        })
        .into_iter()
        .collect()
}

/// What the sampler needs to know about a multicurve type.
struct Plan {
    base: SurfaceSig,
    cut: CutData,
    k: usize,
    v: FastPoly,
}

impl Plan {
    fn new(config: &MultiCurveConfig) -> Result<Self> {
        let cut = cut_surface(config)?;
        for p in &cut.pieces {
            if !(p.is_pants() || *p == SurfaceSig::holed_torus()) {
                return Err(Error::UnsupportedConfiguration(format!(
                    "{} with `{}`: piece {p} has no moduli sampler",
                    config.base, config.tag
                )));
            }
        }
        let v = assemble_v(config, VolumeTable::shipped())?.to_fast();
        Ok(Plan { base: config.base, cut, k: config.k(), v })
    }

    /// Steps 2 and 3: pieces from their moduli laws, then uniform twists.
    fn complete(&self, lengths: Vec<f64>, cfg: &SamplerConfig, rng: &mut ChaCha8Rng) -> Result<FNPoint> {
        let mut ls = lengths;
        let mut inner_l = Vec::new();
        let mut inner_t = Vec::new();
        for (p, map) in self.cut.pieces.iter().zip(&self.cut.boundary_map) {
            if *p == SurfaceSig::holed_torus() {
                let b = ls[map[0]];
                let x = draw_fd(ModuliSurface::HoledTorus(b), cfg.fd_convention, cfg.rejection_cap, rng)?;
                inner_l.push(x.length());
                inner_t.push(x.twist_coord());
            }
        }
        let mut ts: Vec<f64> = ls.iter().map(|l| l * rng.random::<f64>()).collect();
        ls.extend(inner_l);
        ts.extend(inner_t);
        let ends = (self.base.n + self.base.b) as usize;
        FNPoint::new(self.base, ls, ts, vec![0.0; ends])
    }
}

fn check_level(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("L = {l} must be positive")))
    }
}

/// The three-step random surface: `𝐋 ∝ f(𝐋/L)·V(γ, 𝐋)`, pieces from their
/// moduli laws, twists uniform. Coordinates list the components of `γ` first.
pub fn sample_horoball(
    config: &MultiCurveConfig,
    f: &WeightFunction,
    l: f64,
    cfg: &SamplerConfig,
) -> Result<Vec<SurfaceSample>> {
    cfg.validate()?;
    check_level(l)?;
    let plan = Plan::new(config)?;
    f.validate(plan.k)?;
    let (lo, hi) = f.support();
    let lo: Vec<f64> = lo.iter().map(|x| l * x.max(0.0)).collect();
    let hi: Vec<f64> = hi.iter().map(|x| l * x).collect();
    let bound = f.sup_bound() * plan.v.bound_on_box(&hi);
    if !(bound > 0.0) || lo.iter().zip(&hi).any(|(a, b)| a >= b) {
        return Err(Error::InvalidInput("weight function has empty support".into()));
    }
    cfg.exec
        .map_range(cfg.sample_count, |i| {
            let mut rng = substream(cfg.seed, i as u64);
            let lengths = rejection(cfg.rejection_cap, &mut rng, |rng| {
                let ls: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b - (b - a) * rng.random::<f64>()).collect();
                let x: Vec<f64> = ls.iter().map(|v| v / l).collect();
                (f.eval(&x) * plan.v.eval(&ls) / bound, ls)
            })?;
            let point = plan.complete(lengths, cfg, &mut rng)?;
            Ok(SurfaceSample { point, weight: 1.0, provenance: Provenance::Horoball })
        })
        .into_iter()
        .collect()
}

fn rejection<R>(
    cap: u64,
    rng: &mut ChaCha8Rng,
    mut propose: impl FnMut(&mut ChaCha8Rng) -> (f64, R),
) -> Result<R> {
    for _ in 0..cap {
        let (p, r) = propose(rng);
        if p > 1.0 + 1e-9 {
            return Err(Error::NumericalInstability(format!("rejection ratio {p} exceeds its bound")));
        }
        if rng.random::<f64>() < p {
            return Ok(r);
        }
    }
    Err(Error::RejectionCapExceeded(cap))
}

/// Samples of the horosphere `{ℓ_{𝐚·γ} = L}` with density `∝ f·V` against `η_𝐚`.
pub fn sample_horosphere(
    config: &MultiCurveConfig,
    a: &[Rational64],
    f: &WeightFunction,
    l: f64,
    cfg: &SamplerConfig,
) -> Result<Vec<SurfaceSample>> {
    cfg.validate()?;
    check_level(l)?;
    let plan = Plan::new(config)?;
    let k = plan.k;
    f.validate(k)?;
    if a.len() != k || a.iter().any(|w| *w <= Rational64::from_integer(0)) {
        return Err(Error::InvalidInput(format!("𝐚 must have {k} positive entries")));
    }
    let af: Vec<f64> = a.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect();
    let hi: Vec<f64> = af.iter().map(|ai| l / ai).collect();
    let bound = f.sup_bound() * plan.v.bound_on_box(&hi);
    if k == 1 && f.eval(&[1.0 / af[0]]) <= 0.0 {
        return Err(Error::InvalidInput("weight function vanishes on the horosphere".into()));
    }
    if !(bound > 0.0) {
        return Err(Error::InvalidInput("weight function has empty support".into()));
    }
    cfg.exec
        .map_range(cfg.sample_count, |i| {
            let mut rng = substream(cfg.seed, i as u64);
            let lengths = if k == 1 {
                vec![hi[0]]
            } else {
                rejection(cfg.rejection_cap, &mut rng, |rng| {
                    // Uniform on the simplex via normalized exponentials.
                    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                    let s: f64 = e.iter().sum();
                    let mut x: Vec<f64> = e.iter().zip(&af).map(|(ei, ai)| ei / s / ai).collect();
                    let used: f64 = x[..k - 1].iter().zip(&af).map(|(xi, ai)| xi * ai).sum();
                    x[k - 1] = ((1.0 - used) / af[k - 1]).max(0.0);
                    let ls: Vec<f64> = x.iter().map(|v| v * l).collect();
                    (f.eval(&x) * plan.v.eval(&ls) / bound, ls)
                })?
            };
            if lengths.iter().any(|v| *v <= 0.0) {
                return Err(Error::NumericalInstability("degenerate simplex point".into()));
            }
            let point = plan.complete(lengths, cfg, &mut rng)?;
            Ok(SurfaceSample { point, weight: 1.0, provenance: Provenance::Horosphere })
        })
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::geometry::{systole, Slope};
    use crate::measures::effective_sample_size;

    fn ks_uniform(mut u: Vec<f64>) -> f64 {
        u.sort_by(f64::total_cmp);
        let n = u.len() as f64;
        u.iter()
            .enumerate()
            .map(|(i, x)| ((i + 1) as f64 / n - x).abs().max((x - i as f64 / n).abs()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn wp_cell_mean_and_determinism() {
        let cfg = SamplerConfig::new(1, 100_000);
        let pts = sample_wp_cell(SurfaceSig::torus(), &[0.0], &[(1.0, 3.0)], &[(0.0, 1.0)], &cfg).unwrap();
        let mean = pts.iter().map(|p| p.length()).sum::<f64>() / pts.len() as f64;
        let se = (4.0f64 / 12.0 / 100_000.0).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se);
        let again = sample_wp_cell(SurfaceSig::torus(), &[0.0], &[(1.0, 3.0)], &[(0.0, 1.0)], &cfg.with_exec(Exec::Sequential))
            .unwrap();
        assert_eq!(pts, again);
    }

    #[test]
    fn wp_cell_chi_square() {
        let cfg = SamplerConfig::new(2, 100_000);
        let pts = sample_wp_cell(SurfaceSig::torus(), &[0.0], &[(1.0, 3.0)], &[(0.0, 1.0)], &cfg).unwrap();
        let mut bins = [0u32; 100];
        for p in &pts {
            let i = (((p.length() - 1.0) / 2.0 * 10.0) as usize).min(9);
            let j = ((p.twist_coord() * 10.0) as usize).min(9);
            bins[10 * i + j] += 1;
        }
        let e = pts.len() as f64 / 100.0;
        let chi2: f64 = bins.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
        // 99% quantile of χ² with 99 degrees of freedom.
        assert!(chi2 < 134.642, "{chi2}");
    }

    #[test]
    fn fd_samples_have_fn_systole() {
        let cfg = SamplerConfig::new(3, 2000);
        for s in [ModuliSurface::Torus, ModuliSurface::HoledTorus(2.5)] {
            for conv in [FdConvention::HalfCell, FdConvention::FullCell] {
                for x in sample_moduli_fd(s, &cfg.with_convention(conv)).unwrap() {
                    let (slope, len) = systole(&x.point).unwrap();
                    assert!(slope == Slope::FN || (len - x.point.length()).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn horoball_length_marginal() {
        let config = MultiCurveConfig::torus_curve();
        let f = WeightFunction::box_indicator(&[1.0]);
        let cfg = SamplerConfig::new(4, 100_000);
        let s = sample_horoball(&config, &f, 10.0, &cfg).unwrap();
        let u: Vec<f64> = s.iter().map(|x| (x.point.length() / 10.0).powi(2)).collect();
        assert!(ks_uniform(u) < 0.02);
        let v: Vec<f64> = s.iter().map(|x| x.point.twist_coord() / x.point.length()).collect();
        assert!(ks_uniform(v) < 0.02);
    }

    #[test]
    fn horoball_avoids_zero_set() {
        let config = MultiCurveConfig::torus_curve();
        let f = WeightFunction::constant_on(1.0, &[0.5], &[1.0]);
        let s = sample_horoball(&config, &f, 4.0, &SamplerConfig::new(5, 5000)).unwrap();
        assert!(s.iter().all(|x| x.point.length() >= 2.0));
    }

    #[test]
    fn horoball_unsupported_piece() {
        let config = MultiCurveConfig::new(SurfaceSig::new(2, 0, 0).unwrap(), "nonsep", None).unwrap();
        let f = WeightFunction::box_indicator(&[1.0]);
        let e = sample_horoball(&config, &f, 4.0, &SamplerConfig::new(5, 10)).unwrap_err();
        assert!(matches!(e, Error::UnsupportedConfiguration(_)));
    }

    #[test]
    fn genus_two_separating_has_torus_pieces() {
        let config = MultiCurveConfig::new(SurfaceSig::new(2, 0, 0).unwrap(), "sep", None).unwrap();
        let f = WeightFunction::box_indicator(&[1.0]);
        let s = sample_horoball(&config, &f, 6.0, &SamplerConfig::new(6, 500)).unwrap();
        for x in &s {
            assert_eq!(x.point.pants_curve_lengths.len(), 3);
            let b = x.point.length();
            for j in 1..3 {
                let t = FNPoint::holed_torus(x.point.pants_curve_lengths[j], x.point.twists[j], b).unwrap();
                assert_eq!(systole(&t).unwrap().0, Slope::FN);
            }
        }
    }

    #[test]
    fn horosphere_constraint() {
        let one = Rational64::from_integer(1);
        let config = MultiCurveConfig::torus_curve();
        let f = WeightFunction::box_indicator(&[3.0]);
        let a = [Rational64::new(1, 2)];
        let s = sample_horosphere(&config, &a, &f, 0.4, &SamplerConfig::new(7, 100)).unwrap();
        assert!(s.iter().all(|x| x.point.length() == 0.8));
        let g12 = MultiCurveConfig::new(SurfaceSig::new(1, 2, 0).unwrap(), "nonsep2", None).unwrap();
        let f2 = WeightFunction::box_indicator(&[1.0, 1.0]);
        let a2 = [one, Rational64::new(3, 2)];
        let s = sample_horosphere(&g12, &a2, &f2, 1.2, &SamplerConfig::new(8, 2000)).unwrap();
        for x in &s {
            let r = x.point.pants_curve_lengths[0] + 1.5 * x.point.pants_curve_lengths[1];
            assert!((r - 1.2).abs() < 1e-9 * 1.2);
        }
    }

    #[test]
    fn horosphere_two_component_marginal() {
        // On S_{1,2} with two nonseparating curves V ∝ ℓ₁ℓ₂, so along the
        // segment ℓ₁ + ℓ₂ = L the first length has density ∝ x(L − x).
        let g12 = MultiCurveConfig::new(SurfaceSig::new(1, 2, 0).unwrap(), "nonsep2", None).unwrap();
        let f = WeightFunction::box_indicator(&[1.0, 1.0]);
        let one = Rational64::from_integer(1);
        let s = sample_horosphere(&g12, &[one, one], &f, 1.0, &SamplerConfig::new(9, 20_000)).unwrap();
        let u: Vec<f64> = s
            .iter()
            .map(|x| {
                let t = x.point.pants_curve_lengths[0];
                3.0 * t * t - 2.0 * t * t * t
            })
            .collect();
        assert!(ks_uniform(u) < 0.03);
    }

    #[test]
    fn target_weights_and_ess() {
        let cfg = SamplerConfig::new(10, 2000);
        let s = sample_target_mirzakhani(ModuliSurface::Torus, &cfg).unwrap();
        assert!(s.iter().all(|x| x.weight > 0.0));
        assert!(effective_sample_size(&s) >= 0.1 * s.len() as f64);
    }

    #[test]
    fn streams_do_not_depend_on_execution() {
        let config = MultiCurveConfig::torus_curve();
        let f = WeightFunction::box_indicator(&[1.0]);
        let cfg = SamplerConfig::new(11, 300);
        let a = sample_horoball(&config, &f, 7.0, &cfg.with_exec(Exec::Parallel)).unwrap();
        let b = sample_horoball(&config, &f, 7.0, &cfg.with_exec(Exec::Sequential)).unwrap();
        assert_eq!(a, b);
    }
}
