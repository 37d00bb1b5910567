use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::SurfaceSig;

/// Length of the three shortest curves on the modular torus.
pub fn modular_length() -> f64 {
    2.0 * 1.5f64.acosh()
}

/// A marked hyperbolic structure in Fenchel–Nielsen coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FNPoint {
    pub surface: SurfaceSig,
    pub pants_curve_lengths: Vec<f64>,
    pub twists: Vec<f64>,
    /// One entry per puncture and boundary component; 0 encodes a cusp.
    pub boundary_lengths: Vec<f64>,
}

impl FNPoint {
    pub fn new(
        surface: SurfaceSig,
        pants_curve_lengths: Vec<f64>,
        twists: Vec<f64>,
        boundary_lengths: Vec<f64>,
    ) -> Result<Self> {
        let x = FNPoint { surface, pants_curve_lengths, twists, boundary_lengths };
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.surface.complexity().max(0) as usize;
        if self.pants_curve_lengths.len() != k || self.twists.len() != k {
            return Err(Error::InvalidInput(format!(
                "{} needs {k} lengths and twists, got {} and {}",
                self.surface,
                self.pants_curve_lengths.len(),
                self.twists.len()
            )));
        }
        let ends = (self.surface.n + self.surface.b) as usize;
        if self.boundary_lengths.len() != ends {
            return Err(Error::InvalidInput(format!(
                "{} needs {ends} boundary lengths, got {}",
                self.surface,
                self.boundary_lengths.len()
            )));
        }
        if let Some(l) = self.pants_curve_lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidInput(format!("pants curve length {l} must be positive")));
        }
        if let Some(t) = self.twists.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidInput(format!("twist {t} must be finite")));
        }
        if let Some(b) = self.boundary_lengths.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return Err(Error::InvalidInput(format!("boundary length {b} must be non-negative")));
        }
        let n = self.surface.n as usize;
        if self.boundary_lengths[..n].iter().any(|&b| b != 0.0) {
            return Err(Error::InvalidInput("punctures must have boundary length 0".into()));
        }
        Ok(())
    }

    /// Cusped torus.
    pub fn torus(l: f64, tau: f64) -> Result<Self> {
        Self::new(SurfaceSig::torus(), vec![l], vec![tau], vec![0.0])
    }

    /// Torus with one geodesic boundary of length `b`.
    pub fn holed_torus(l: f64, tau: f64, b: f64) -> Result<Self> {
        Self::new(SurfaceSig::holed_torus(), vec![l], vec![tau], vec![b])
    }

    /// Four-punctured sphere.
    pub fn sphere4(l: f64, tau: f64) -> Result<Self> {
        Self::new(SurfaceSig::sphere4(), vec![l], vec![tau], vec![0.0; 4])
    }

    /// The torus with trace triple (3, 3, 3).
    pub fn modular() -> Self {
        Self::torus(modular_length(), 0.0).expect("valid")
    }

    pub fn length(&self) -> f64 {
        self.pants_curve_lengths[0]
    }

    pub fn twist_coord(&self) -> f64 {
        self.twists[0]
    }
}
