//! Random samplers for the Weil–Petersson, horoball, horosphere and
//! Mirzakhani-target measures, and the scalar estimators built on them.
//!
//! Sample `i` of a run always draws from its own ChaCha stream `(seed, i)`, so
//! streams are bit-identical across thread counts and execution modes.

mod ball;
mod fd;
mod samplers;

pub use ball::{estimate_horosphere_ball_mass, horosphere_center, BallMass};
pub use fd::{fd_chart, fd_lmax, in_torus_fd, FdConvention, ModuliSurface};
pub use samplers::{
    fd_importance_draws, sample_horoball, sample_horosphere, sample_moduli_fd, sample_target_mirzakhani,
    sample_wp_cell, FdDraw,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::mirzakhani_function;
use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Exec};
use crate::geometry::FNPoint;

/// The random stream of sample `i`.
pub fn substream(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub sample_count: usize,
    /// Proposals allowed per emitted sample.
    pub rejection_cap: u64,
    pub fd_convention: FdConvention,
    #[serde(skip)]
    pub exec: Exec,
}

impl SamplerConfig {
    pub fn new(seed: u64, sample_count: usize) -> Self {
        SamplerConfig {
            seed,
            sample_count,
            rejection_cap: 1_000_000,
            fd_convention: FdConvention::default(),
            exec: Exec::default(),
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_convention(mut self, conv: FdConvention) -> Self {
        self.fd_convention = conv;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::InvalidInput("sample_count must be at least 1".into()));
        }
        if self.rejection_cap == 0 {
            return Err(Error::InvalidInput("rejection_cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Which law a sample was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    WpCell,
    ModuliFd,
    Horoball,
    Horosphere,
    Target,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::WpCell => "wp_cell",
            Provenance::ModuliFd => "moduli_fd",
            Provenance::Horoball => "horoball",
            Provenance::Horosphere => "horosphere",
            Provenance::Target => "target",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub point: FNPoint,
    /// Importance weight; 1 for direct samples.
    pub weight: f64,
    pub provenance: Provenance,
}

/// Kish effective sample size `(Σw)²/Σw²`.
pub fn effective_sample_size(samples: &[SurfaceSample]) -> f64 {
    let w: Vec<f64> = samples.iter().map(|s| s.weight).collect();
    let w2: Vec<f64> = w.iter().map(|x| x * x).collect();
    let s = pairwise_sum(&w);
    s * s / pairwise_sum(&w2)
}

/// Mean and standard error of `values`.
pub(crate) fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = if n > 1.0 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
    (mean, (var / n).sqrt())
}

/// `b = ∫ B dμ_wp` over the fundamental domain, by importance sampling.
pub fn estimate_bgn(surface: ModuliSurface, cfg: &SamplerConfig) -> Result<(f64, f64)> {
    let draws = fd_importance_draws(surface, cfg)?;
    let vals: Vec<Result<f64>> = cfg.exec.map_slice(&draws, |d| match &d.point {
        Some(x) => Ok(d.weight * mirzakhani_function(x)?),
        None => Ok(0.0),
    });
    let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(mean_stderr(&vals))
}

/// Weil–Petersson area of the fundamental domain, by importance sampling.
pub fn estimate_fd_area(surface: ModuliSurface, cfg: &SamplerConfig) -> Result<(f64, f64)> {
    let draws = fd_importance_draws(surface, cfg)?;
    let vals: Vec<f64> = draws.iter().map(|d| if d.point.is_some() { d.weight } else { 0.0 }).collect();
    Ok(mean_stderr(&vals))
}
