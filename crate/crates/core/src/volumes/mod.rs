//! Weil–Petersson volume polynomials and the closed-form horoball and
//! horosphere masses built from them.

mod poly;
pub mod quad;
mod weight;

pub use poly::{combine_pi_groups, rat, rat_from_f64, FastPoly, GradedPoly, Mono};
pub use weight::{Callable, Cell, WeightFunction};

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::topology::{cut_surface, MultiCurveConfig, SurfaceSig};

#[derive(Clone, Debug)]
pub struct VolumeEntry {
    pub poly: GradedPoly,
    pub provenance: String,
    /// Whether the entry has been checked against Monte Carlo in this crate.
    pub verified: bool,
}

/// Volume polynomials `V_{g,n}^b(L₁,…,L_b)` keyed by `(g, n, b)`.
#[derive(Clone, Debug)]
pub struct VolumeTable {
    pub entries: BTreeMap<(u32, u32, u32), VolumeEntry>,
}

#[derive(Deserialize)]
struct TermRow {
    exps: Vec<u32>,
    pi: u32,
    q: String,
}

#[derive(Deserialize)]
struct EntryRow {
    g: u32,
    n: u32,
    b: u32,
    terms: Vec<TermRow>,
    provenance: String,
    verified: bool,
}

#[derive(Deserialize)]
struct TableFile {
    version: u32,
    entries: Vec<EntryRow>,
}

pub const TABLE_VERSION: u32 = 1;

fn parse_q(s: &str) -> BigRational {
    let r: Rational64 = s.parse().expect("rational coefficient");
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl VolumeTable {
    /// The table shipped with the crate.
    pub fn shipped() -> &'static VolumeTable {
        static T: OnceLock<VolumeTable> = OnceLock::new();
        T.get_or_init(|| Self::from_json(include_str!("../../data/volumes.json")).expect("volume table parses"))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if file.version != TABLE_VERSION {
            return Err(Error::InvalidInput(format!("volume table version {}", file.version)));
        }
        let mut entries = BTreeMap::new();
        for e in file.entries {
            let poly = GradedPoly::from_terms(
                e.b as usize,
                e.terms.iter().map(|t| (t.exps.clone(), t.pi, parse_q(&t.q))),
            );
            entries.insert((e.g, e.n, e.b), VolumeEntry { poly, provenance: e.provenance, verified: e.verified });
        }
        Ok(VolumeTable { entries })
    }

    /// Only the entries confirmed in this crate.
    pub fn verified_only(&self) -> VolumeTable {
        VolumeTable { entries: self.entries.iter().filter(|(_, e)| e.verified).map(|(k, v)| (*k, v.clone())).collect() }
    }

    pub fn get(&self, s: SurfaceSig) -> Result<&VolumeEntry> {
        self.entries.get(&(s.g, s.n, s.b)).ok_or_else(|| Error::MissingTableEntry(s.to_string()))
    }
}

fn big(r: &Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// `V(γ, 𝐋) = σ/[Stab:Stab₀] · 2^{−ρ} · ∏ⱼ Vⱼ(𝐋ⱼ) · ℓ₁⋯ℓ_k`.
pub fn assemble_v(config: &MultiCurveConfig, table: &VolumeTable) -> Result<GradedPoly> {
    let cut = cut_surface(config)?;
    let k = config.k();
    let pre = big(&cut.sigma) / BigRational::from_integer(BigInt::from(cut.stab_index))
        / BigRational::from_integer(BigInt::from(1u64 << cut.rho));
    let mut v = GradedPoly::constant(k, pre, 0);
    for (piece, map) in cut.pieces.iter().zip(&cut.boundary_map) {
        v = v.mul(&table.get(*piece)?.poly.substitute(k, map));
    }
    for i in 0..k {
        v = v.mul(&GradedPoly::var(k, i));
    }
    Ok(v)
}

/// Top-degree part.
pub fn leading_w(v: &GradedPoly) -> GradedPoly {
    v.leading()
}

/// Exact polynomial evaluation.
pub fn poly_eval(p: &GradedPoly, point: &[f64]) -> f64 {
    p.eval(point)
}

#[derive(Clone, Debug)]
pub struct MassQuery {
    pub config: MultiCurveConfig,
    pub f: WeightFunction,
    pub l: f64,
}

impl MassQuery {
    pub fn new(config: MultiCurveConfig, f: WeightFunction, l: f64) -> Result<Self> {
        f.validate(config.k())?;
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidInput(format!("L = {l} must be positive")));
        }
        Ok(MassQuery { config, f, l })
    }
}

/// Which measure a mass refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MassKind {
    Horoball,
    Horosphere,
}

/// `∫ f·P dx` over ℝ^k for an exact polynomial `P` in the normalized lengths.
fn integrate_against(f: &WeightFunction, p: &GradedPoly) -> Result<f64> {
    match f {
        WeightFunction::Piecewise(cells) => {
            let mut total = GradedPoly::zero(0);
            for c in cells {
                total = total.add(&c.poly.mul(p).integrate_box(&c.lo_rat(), &c.hi_rat()));
            }
            Ok(combine_pi_groups(&total.pi_groups(&[])))
        }
        WeightFunction::Callable { f, lo, hi, .. } => {
            let fast = p.to_fast();
            quad::integrate_box(&|x| Ok(f(x) * fast.eval(x)), lo, hi, 1e-8)
        }
    }
}

/// `∫_{Δ_𝐚} f·P dη_𝐚` with `Δ_𝐚 = {x ≥ 0 : Σ aᵢxᵢ = 1}`, `η_𝐚 = (1/a_k)dx₁⋯dx_{k−1}`.
fn integrate_on_simplex(f: &WeightFunction, p: &GradedPoly, a: &[Rational64]) -> Result<f64> {
    let k = a.len();
    let ab: Vec<BigRational> = a.iter().map(big).collect();
    let af: Vec<f64> = a.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect();
    let inv_last = BigRational::one() / ab[k - 1].clone();
    match (f, k) {
        (WeightFunction::Piecewise(cells), 1) => {
            let x = inv_last.clone();
            let xf = 1.0 / af[0];
            let Some(c) = cells.iter().find(|c| c.contains(&[xf])) else { return Ok(0.0) };
            let g = c.poly.mul(p).pi_groups(&[x]);
            Ok(combine_pi_groups(&g.into_iter().map(|(m, q)| (m, q * inv_last.clone())).collect()))
        }
        (WeightFunction::Piecewise(cells), 2) => {
            // x₂ = (1 − a₁x₁)/a₂ and x₁ ranges over an interval per cell.
            let mut total = GradedPoly::zero(0);
            for c in cells {
                let (lo, hi) = (c.lo_rat(), c.hi_rat());
                let one = BigRational::one();
                let mut x_lo = BigRational::zero().max(lo[0].clone());
                let mut x_hi = (one.clone() / ab[0].clone()).min(hi[0].clone());
                x_lo = x_lo.max((one.clone() - ab[1].clone() * hi[1].clone()) / ab[0].clone());
                x_hi = x_hi.min((one.clone() - ab[1].clone() * lo[1].clone()) / ab[0].clone());
                if x_lo >= x_hi {
                    continue;
                }
                let q = c.poly.mul(p).eliminate_last(&(one / ab[1].clone()), &[-(ab[0].clone() / ab[1].clone())]);
                total = total.add(&q.integrate_box(&[x_lo], &[x_hi]).scale(&inv_last));
            }
            Ok(combine_pi_groups(&total.pi_groups(&[])))
        }
        _ => {
            let fast = p.to_fast();
            simplex_quadrature(&|x| f.eval(x) * fast.eval(x), &af)
        }
    }
}

/// Nested quadrature over `Δ_𝐚` parametrized by the first `k − 1` coordinates.
pub(crate) fn simplex_quadrature(g: &(dyn Fn(&[f64]) -> f64 + Sync), a: &[f64]) -> Result<f64> {
    let k = a.len();
    if k == 1 {
        return Ok(g(&[1.0 / a[0]]) / a[0]);
    }
    fn rec(g: &(dyn Fn(&[f64]) -> f64 + Sync), a: &[f64], x: &mut Vec<f64>, used: f64) -> Result<f64> {
        let k = a.len();
        let d = x.len();
        if d == k - 1 {
            x.push(((1.0 - used) / a[k - 1]).max(0.0));
            let v = g(x);
            x.pop();
            return Ok(v);
        }
        let hi = ((1.0 - used) / a[d]).max(0.0);
        quad::integrate(
            |t| {
                x.push(t);
                let v = rec(g, a, x, used + a[d] * t);
                x.pop();
                v
            },
            0.0,
            hi,
            1e-8,
            1e-300,
        )
    }
    Ok(rec(g, a, &mut Vec::with_capacity(k), 0.0)? / a[k - 1])
}

fn scaled_v(v: &GradedPoly, l: f64, extra_power: usize) -> GradedPoly {
    let lr = rat_from_f64(l);
    v.scale_vars(&lr).scale(&num_traits::pow(lr, extra_power))
}

/// `m = ∫ f(𝐱)·V(γ, L𝐱)·L^k d𝐱`.
pub fn horoball_mass(q: &MassQuery, table: &VolumeTable) -> Result<f64> {
    let v = assemble_v(&q.config, table)?;
    integrate_against(&q.f, &scaled_v(&v, q.l, q.config.k()))
}

/// `n = ∫_{Δ_𝐚} f(𝐱)·V(γ, L𝐱)·L^{k−1} dη_𝐚`, with `𝐚` the configuration weights.
pub fn horosphere_mass(q: &MassQuery, table: &VolumeTable) -> Result<f64> {
    let v = assemble_v(&q.config, table)?;
    integrate_on_simplex(&q.f, &scaled_v(&v, q.l, q.config.k() - 1), &q.config.weights)
}

/// `lim m/L^{6g−6+2n}` (resp. `lim n/L^{6g−7+2n}`): the same integrals with `W`.
pub fn asymptotic_mass_limit(q: &MassQuery, kind: MassKind, table: &VolumeTable) -> Result<f64> {
    let w = leading_w(&assemble_v(&q.config, table)?);
    match kind {
        MassKind::Horoball => integrate_against(&q.f, &w),
        MassKind::Horosphere => integrate_on_simplex(&q.f, &w, &q.config.weights),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{symmetry_constants, table};

    fn torus_query(a: f64, l: f64) -> MassQuery {
        MassQuery::new(MultiCurveConfig::torus_curve(), WeightFunction::box_indicator(&[a]), l).unwrap()
    }

    #[test]
    fn shipped_table_is_graded() {
        for ((g, n, b), e) in &VolumeTable::shipped().entries {
            let dim = 6 * g + 2 * n + 2 * b - 6;
            assert!(e.poly.satisfies_grading(dim), "({g},{n},{b})");
            if *g == 0 && n + b == 3 {
                assert_eq!(e.poly, GradedPoly::one(*b as usize));
            }
        }
    }

    #[test]
    fn assembled_degrees() {
        for e in table() {
            let base = SurfaceSig::new(e.g, e.n, 0).unwrap();
            let cfg = MultiCurveConfig::new(base, &e.tag, None).unwrap();
            let v = assemble_v(&cfg, VolumeTable::shipped()).unwrap();
            assert_eq!(v.degree().unwrap() as i64, base.dim() - cfg.k() as i64, "{base} {}", e.tag);
            assert!(v.terms().all(|(_, _, q)| *q > BigRational::zero()));
        }
    }

    #[test]
    fn torus_volume_is_linear() {
        let cfg = MultiCurveConfig::torus_curve();
        let (s, st) = symmetry_constants(&cfg).unwrap();
        let c = big(&s) / BigRational::from_integer(BigInt::from(st));
        let v = assemble_v(&cfg, VolumeTable::shipped()).unwrap();
        assert_eq!(v, GradedPoly::from_terms(1, [(vec![1], 0, c)]));
    }

    #[test]
    fn genus_two_separating_volume() {
        let cfg = MultiCurveConfig::new(SurfaceSig::new(2, 0, 0).unwrap(), "sep", None).unwrap();
        let v = assemble_v(&cfg, VolumeTable::shipped()).unwrap();
        let v11 = &VolumeTable::shipped().get(SurfaceSig::holed_torus()).unwrap().poly;
        let (s, st) = symmetry_constants(&cfg).unwrap();
        let pre = big(&s) / BigRational::from_integer(BigInt::from(st)) / rat(2, 1);
        let expect = v11.mul(v11).mul(&GradedPoly::var(1, 0)).scale(&pre);
        assert_eq!(v, expect);
    }

    #[test]
    fn missing_entries_are_reported() {
        let strict = VolumeTable::shipped().verified_only();
        let cfg = MultiCurveConfig::new(SurfaceSig::new(2, 0, 0).unwrap(), "nonsep", None).unwrap();
        assert!(matches!(assemble_v(&cfg, &strict), Err(Error::MissingTableEntry(_))));
    }

    #[test]
    fn box_mass_closed_form() {
        let (a, l) = (0.7, 9.0);
        let c = 0.5; // σ / stab for the torus curve
        let m = horoball_mass(&torus_query(a, l), VolumeTable::shipped()).unwrap();
        assert!((m - c * a * a * l * l / 2.0).abs() < 1e-13 * m);
        let lim = asymptotic_mass_limit(&torus_query(a, l), MassKind::Horoball, VolumeTable::shipped()).unwrap();
        assert!((lim - c * a * a / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_weight_has_zero_mass() {
        let q = MassQuery::new(MultiCurveConfig::torus_curve(), WeightFunction::zero(1), 5.0).unwrap();
        assert_eq!(horoball_mass(&q, VolumeTable::shipped()).unwrap(), 0.0);
        assert_eq!(horosphere_mass(&q, VolumeTable::shipped()).unwrap(), 0.0);
    }

    #[test]
    fn horosphere_point_mass() {
        let cfg = MultiCurveConfig::torus_curve().with_weights(vec![Rational64::new(3, 2)]).unwrap();
        let q = MassQuery::new(cfg, WeightFunction::box_indicator(&[1.0]), 6.0).unwrap();
        let n = horosphere_mass(&q, VolumeTable::shipped()).unwrap();
        // f(1/a)·V(L/a)/a with V = ℓ/2.
        assert!((n - (6.0 / 1.5) * 0.5 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn two_component_simplex_exact_matches_quadrature() {
        let cfg = MultiCurveConfig::new(SurfaceSig::new(1, 2, 0).unwrap(), "nonsep2", Some(vec![Rational64::new(1, 1), Rational64::new(2, 1)]))
            .unwrap();
        let f = WeightFunction::box_indicator(&[0.8, 0.45]);
        let q = MassQuery::new(cfg.clone(), f.clone(), 4.0).unwrap();
        let exact = horosphere_mass(&q, VolumeTable::shipped()).unwrap();
        let v = scaled_v(&assemble_v(&cfg, VolumeTable::shipped()).unwrap(), 4.0, 1).to_fast();
        let approx = simplex_quadrature(&|x| f.eval(x) * v.eval(x), &[1.0, 2.0]).unwrap();
        assert!((exact - approx).abs() < 1e-6 * exact, "{exact} vs {approx}");
    }

    #[test]
    fn lemma_scaling_k1() {
        let a = Rational64::new(5, 4);
        let l = 7.0;
        let one = WeightFunction::constant_on(1.0, &[0.0], &[100.0]);
        let unit = MultiCurveConfig::torus_curve().with_weights(vec![a / Rational64::from_integer(7)]).unwrap();
        let n1 = horosphere_mass(&MassQuery::new(unit, one.clone(), 1.0).unwrap(), VolumeTable::shipped()).unwrap();
        let at_l = MultiCurveConfig::torus_curve().with_weights(vec![a]).unwrap();
        let nl = horosphere_mass(&MassQuery::new(at_l, one, l).unwrap(), VolumeTable::shipped()).unwrap();
        assert!((n1 - l * nl).abs() < 1e-14 * n1);
    }
}
