//! Fundamental domains for the complexity-one moduli spaces in the torus chart.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{kappa_for_boundary, remark, FNPoint, Mat2};
use crate::topology::SurfaceSig;

/// How the twist of the systole is reduced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdConvention {
    /// `τ ∈ [0, ℓ/2)`: also quotients by the orientation-reversing reflection.
    #[default]
    HalfCell,
    /// `τ ∈ [0, ℓ)`.
    FullCell,
}

impl FdConvention {
    pub fn divisor(self) -> f64 {
        match self {
            FdConvention::HalfCell => 2.0,
            FdConvention::FullCell => 1.0,
        }
    }
}

/// A moduli space with a torus-chart model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModuliSurface {
    Torus,
    /// One geodesic boundary of the given length.
    HoledTorus(f64),
    Sphere4,
}

impl ModuliSurface {
    pub fn from_sig(s: SurfaceSig, boundary: f64) -> Result<Self> {
        if s == SurfaceSig::torus() {
            Ok(ModuliSurface::Torus)
        } else if s == SurfaceSig::holed_torus() {
            Ok(ModuliSurface::HoledTorus(boundary))
        } else if s == SurfaceSig::sphere4() {
            Ok(ModuliSurface::Sphere4)
        } else {
            Err(Error::UnsupportedConfiguration(format!("no moduli sampler for {s}")))
        }
    }

    pub fn sig(self) -> SurfaceSig {
        match self {
            ModuliSurface::Torus => SurfaceSig::torus(),
            ModuliSurface::HoledTorus(_) => SurfaceSig::holed_torus(),
            ModuliSurface::Sphere4 => SurfaceSig::sphere4(),
        }
    }

    /// κ of the underlying torus chart.
    pub fn kappa(self) -> f64 {
        match self {
            ModuliSurface::HoledTorus(b) => kappa_for_boundary(b),
            _ => 0.0,
        }
    }

    /// Point with torus-chart coordinates `(ℓ, τ)`.
    pub(crate) fn torus_point(self, l: f64, tau: f64) -> Result<FNPoint> {
        match self {
            ModuliSurface::HoledTorus(b) => FNPoint::holed_torus(l, tau, b),
            _ => FNPoint::torus(l, tau),
        }
    }
}

/// Largest systole on the torus chart with parameter κ: the largest root `t`
/// of `t³ − 3t² + κ = 0` is the common trace when all three well traces agree.
pub fn fd_lmax(kappa: f64) -> f64 {
    // t³ − 3t² is increasing for t > 2 and equals 4 − … at t = 2; bisect on [2, big].
    let g = |t: f64| t * t * t - 3.0 * t * t + kappa;
    let (mut lo, mut hi) = (2.0, 3.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    2.0 * (0.5 * (lo + hi) / 2.0).acosh()
}

/// Whether `(ℓ, τ)` is in the torus-chart fundamental domain: `τ ∈ [0, ℓ/div)`
/// and the Fenchel–Nielsen curve is no longer than its neighbour `1/0`. For
/// `τ ∈ [0, ℓ)` the neighbour minimizing the trace is `1/0`, and a local
/// minimum of the trace function is global.
pub fn in_torus_fd(l: f64, tau: f64, kappa: f64, div: f64) -> bool {
    if !(tau >= 0.0 && tau < l / div) {
        return false;
    }
    let c = (l / 2.0).cosh();
    let s = (l / 2.0).sinh();
    let m2 = (4.0 * c * c - kappa) / (4.0 * s * s);
    let y = 2.0 * m2.sqrt() * ((tau - l / 2.0) / 2.0).cosh();
    2.0 * c <= y
}

/// Representatives of `SL₂(ℤ)/Γ(2)`; the sphere domain is the union of the
/// full-cell torus domain translated by these.
pub(crate) const SPHERE_COSETS: [Mat2; 6] = [
    Mat2 { a: 1, b: 0, c: 0, d: 1 },
    Mat2 { a: 0, b: -1, c: 1, d: 0 },
    Mat2 { a: 1, b: 1, c: 0, d: 1 },
    Mat2 { a: 1, b: 0, c: 1, d: 1 },
    Mat2 { a: 0, b: -1, c: 1, d: 1 },
    Mat2 { a: 1, b: -1, c: 1, d: 0 },
];

/// Sphere point from a torus-chart point of the full-cell domain and a coset.
pub(crate) fn sphere_from_coset(l: f64, tau: f64, coset: usize) -> Result<FNPoint> {
    let t = remark(&FNPoint::torus(l, tau)?, &SPHERE_COSETS[coset])?;
    FNPoint::sphere4(2.0 * t.length(), t.twist_coord())
}

/// Divisor of the twist range for `surface` under `conv`.
pub(crate) fn divisor(surface: ModuliSurface, conv: FdConvention) -> f64 {
    match surface {
        ModuliSurface::Sphere4 => 1.0,
        _ => conv.divisor(),
    }
}

/// One proposal from the `ℓ`-uniform importance law on the domain's bounding
/// region: returns the point and its weight, or `None` outside the domain.
pub(crate) fn importance_draw(
    surface: ModuliSurface,
    conv: FdConvention,
    rng: &mut ChaCha8Rng,
) -> Result<Option<(FNPoint, f64)>> {
    let kappa = surface.kappa();
    let lmax = fd_lmax(kappa);
    let div = divisor(surface, conv);
    let l = lmax * (1.0 - rng.random::<f64>());
    let tau = l / div * rng.random::<f64>();
    let weight = lmax * l / div;
    if !in_torus_fd(l, tau, kappa, div) {
        return Ok(None);
    }
    Ok(Some(match surface {
        ModuliSurface::Sphere4 => {
            let coset = rng.random_range(0..SPHERE_COSETS.len());
            // The factor 2 is the Jacobian of the length doubling.
            (sphere_from_coset(l, tau, coset)?, weight * SPHERE_COSETS.len() as f64 * 2.0)
        }
        _ => (surface.torus_point(l, tau)?, weight),
    }))
}

/// One rejection proposal from the uniform law on the domain's bounding box.
pub(crate) fn uniform_draw(surface: ModuliSurface, conv: FdConvention, rng: &mut ChaCha8Rng) -> Result<Option<FNPoint>> {
    let kappa = surface.kappa();
    let lmax = fd_lmax(kappa);
    let div = divisor(surface, conv);
    let l = lmax * (1.0 - rng.random::<f64>());
    let tau = lmax / div * rng.random::<f64>();
    if !in_torus_fd(l, tau, kappa, div) {
        return Ok(None);
    }
    Ok(Some(match surface {
        ModuliSurface::Sphere4 => sphere_from_coset(l, tau, rng.random_range(0..SPHERE_COSETS.len()))?,
        _ => surface.torus_point(l, tau)?,
    }))
}

/// Torus-chart coordinates of the domain representative of a torus point
/// (its systole becomes the Fenchel–Nielsen curve).
pub fn fd_chart(x: &FNPoint, conv: FdConvention) -> Result<(f64, f64)> {
    use crate::geometry::{chart_from_triple, model, well, TraceTriple};
    let m = model(x)?;
    let (v, t) = well(&m.triple, m.kappa)?;
    let i = (0..3).min_by(|&a, &b| t[a].total_cmp(&t[b])).unwrap();
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    // Chart with FN = v[i]; the dual curve is the shorter remaining vertex, and
    // the diagonal is v[i] ± dual with the matching trace.
    let (jd, kd) = if t[j] <= t[k] { (j, k) } else { (k, j) };
    let alpha = v[i];
    let mut beta = v[jd];
    if beta.0 * alpha.1 - alpha.0 * beta.1 != 1 {
        beta = (-beta.0, -beta.1);
    }
    let sum = (alpha.0 + beta.0, alpha.1 + beta.1);
    let z = if sum == v[kd] || sum == (-v[kd].0, -v[kd].1) {
        t[kd]
    } else {
        crate::geometry::topograph::other_root(t[i], t[jd], t[kd], m.kappa)
    };
    let tri = TraceTriple { x: t[i], y: t[jd], z };
    let (l, tau) = chart_from_triple(&tri, m.kappa);
    let tau = tau.rem_euclid(l);
    let tau = match conv {
        FdConvention::FullCell => tau,
        FdConvention::HalfCell => tau.min(l - tau),
    };
    Ok((l, tau))
}
