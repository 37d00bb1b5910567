//! Holonomy of the torus models and the trace-coordinate bridge.
//!
//! The four-punctured sphere is handled through its torus double cover: a
//! sphere curve of slope `s` lifts to the torus curve of the same slope, and
//! its holonomy trace is `t² − 2` where `t` is the torus trace. Lengths double.

use crate::error::{Error, Result};
use crate::topology::SurfaceSig;

use super::point::FNPoint;

pub type Mat = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn mat_inv(a: &Mat) -> Mat {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn det(a: &Mat) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn trace(a: &Mat) -> f64 {
    a[0][0] + a[1][1]
}

/// Traces of the curves `0/1`, `1/0`, `1/1` on a torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceTriple {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TraceTriple {
    pub fn relation(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z - self.x * self.y * self.z
    }

    /// `|relation − κ|`, scaled by `max(1, xyz)` so large triples are judged fairly.
    pub fn relative_residual(&self, kappa: f64) -> f64 {
        let scale = (self.x * self.y * self.z).abs().max(1.0);
        (self.relation() - kappa).abs() / scale
    }
}

/// Relation constant `x² + y² + z² − xyz` for boundary length `b` (0 for a cusp).
pub fn kappa_for_boundary(b: f64) -> f64 {
    2.0 - 2.0 * (b / 2.0).cosh()
}

/// Which length function sits on top of the torus traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cover {
    /// Lengths are `2 arccosh(t/2)`.
    Torus,
    /// Four-punctured sphere: lengths are twice the torus lengths.
    Sphere,
}

/// Torus trace data underlying every geometry-supported point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Model {
    pub triple: TraceTriple,
    pub kappa: f64,
    pub cover: Cover,
}

impl Model {
    /// Converts a torus trace into a curve length.
    pub fn length_from_trace(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if !(t - 2.0 > 1e-12) {
            return Err(Error::NumericalInstability(format!("trace {t} is not hyperbolic")));
        }
        let l = 2.0 * (t / 2.0).acosh();
        Ok(match self.cover {
            Cover::Torus => l,
            Cover::Sphere => 2.0 * l,
        })
    }

    /// Length of the curve with vector `v`, switching to logarithmic traces
    /// when the linear ones overflow.
    pub(crate) fn length_of_vec(&self, v: (i128, i128)) -> Result<f64> {
        let t = super::topograph::trace_of(&self.triple, self.kappa, v);
        if t.is_finite() {
            return self.length_from_trace(t);
        }
        let lt = super::topograph::log_trace_of(&self.triple, self.kappa, v);
        let l = super::topograph::length_from_log_trace(lt);
        Ok(match self.cover {
            Cover::Torus => l,
            Cover::Sphere => 2.0 * l,
        })
    }

    /// Inverse of `length_from_trace`.
    pub fn trace_from_length(&self, l: f64) -> f64 {
        let l = match self.cover {
            Cover::Torus => l,
            Cover::Sphere => l / 2.0,
        };
        2.0 * (l / 2.0).cosh()
    }
}

/// Torus chart `(ℓ, τ)` underlying a geometry-supported point.
pub(crate) fn torus_chart(x: &FNPoint) -> Result<(f64, f64, f64, Cover)> {
    let s = x.surface;
    if s == SurfaceSig::torus() || s == SurfaceSig::holed_torus() {
        Ok((x.length(), x.twist_coord(), kappa_for_boundary(x.boundary_lengths[0]), Cover::Torus))
    } else if s == SurfaceSig::sphere4() {
        Ok((x.length() / 2.0, x.twist_coord(), 0.0, Cover::Sphere))
    } else {
        Err(Error::UnsupportedConfiguration(format!("no holonomy model for {s}")))
    }
}

fn torus_m(l: f64, kappa: f64) -> f64 {
    let c = (l / 2.0).cosh();
    let s = (l / 2.0).sinh();
    ((4.0 * c * c - kappa) / (4.0 * s * s)).sqrt()
}

/// Trace triple of the torus chart; `x = 2cosh(ℓ/2)` by construction.
pub(crate) fn chart_triple(l: f64, tau: f64, kappa: f64) -> TraceTriple {
    let m = torus_m(l, kappa);
    TraceTriple {
        x: 2.0 * (l / 2.0).cosh(),
        y: 2.0 * m * ((tau - l / 2.0) / 2.0).cosh(),
        z: 2.0 * m * ((tau + l / 2.0) / 2.0).cosh(),
    }
}

/// Recovers the torus chart `(ℓ, τ)` from a trace triple.
pub(crate) fn chart_from_triple(t: &TraceTriple, kappa: f64) -> (f64, f64) {
    let c = t.x / 2.0;
    let l = 2.0 * c.acosh();
    let s = (l / 2.0).sinh();
    let m = torus_m(l, kappa);
    let w = ((t.z - t.y * c) / (2.0 * m * s)).asinh();
    (l, 2.0 * w + l / 2.0)
}

pub(crate) fn model(x: &FNPoint) -> Result<Model> {
    let (l, tau, kappa, cover) = torus_chart(x)?;
    Ok(Model { triple: chart_triple(l, tau, kappa), kappa, cover })
}

/// Generator matrices, traces and (for the sphere) the sphere traces.
#[derive(Clone, Debug, PartialEq)]
pub struct Holonomy {
    /// Holonomy of the Fenchel–Nielsen curve (of the torus cover for the sphere).
    pub a: Mat,
    pub b: Mat,
    pub triple: TraceTriple,
    pub kappa: f64,
    /// Traces of the sphere curves `0/1`, `1/0`, `1/1`, when the surface is S_{0,4}.
    pub sphere_triple: Option<TraceTriple>,
}

/// Relation satisfied by sphere traces `(P, Q, R)`:
/// `P² + Q² + R² − PQR + 8(P + Q + R) + 28 = 0`.
pub fn sphere_relation(t: &TraceTriple) -> f64 {
    let (p, q, r) = (t.x, t.y, t.z);
    p * p + q * q + r * r - p * q * r + 8.0 * (p + q + r) + 28.0
}

pub fn build_holonomy(x: &FNPoint) -> Result<Holonomy> {
    let (l, tau, kappa, cover) = torus_chart(x)?;
    let m = torus_m(l, kappa);
    let w = (tau - l / 2.0) / 2.0;
    let beta = (m * m - 1.0).sqrt();
    let a = [[(l / 2.0).exp(), 0.0], [0.0, (-l / 2.0).exp()]];
    let b = [[m * w.exp(), beta], [beta, m * (-w).exp()]];
    let triple = chart_triple(l, tau, kappa);
    for g in [&a, &b] {
        if (det(g) - 1.0).abs() > 1e-9 * g[0][0].abs().max(g[1][1].abs()).powi(2).max(1.0) {
            return Err(Error::NumericalInstability(format!("generator determinant {}", det(g))));
        }
    }
    let residual = triple.relative_residual(kappa);
    if residual > 1e-9 {
        return Err(Error::NumericalInstability(format!("trace relation residual {residual:e}")));
    }
    let sphere_triple = (cover == Cover::Sphere).then(|| TraceTriple {
        x: triple.x * triple.x - 2.0,
        y: triple.y * triple.y - 2.0,
        z: triple.z * triple.z - 2.0,
    });
    Ok(Holonomy { a, b, triple, kappa, sphere_triple })
}
