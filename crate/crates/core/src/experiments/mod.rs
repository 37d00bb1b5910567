//! Named, reproducible experiments and the statistics they rely on.
//!
//! Every runner is a pure function of its parameters (seeds included); the
//! pass/fail thresholds are parameters too. Weak-★ convergence is tested
//! through KS distances of finitely many bounded statistics, which is a
//! necessary but not sufficient proxy.

mod bound;
mod counting;
mod equidistribution;
mod mass;
pub mod report;
pub mod stats;
mod thin;
mod twist;

pub use bound::{run_mirzakhani_bound, BoundParams};
pub use counting::{run_counting, CountingParams};
pub use equidistribution::{run_equidistribution, EquidistributionParams, SamplerKind};
pub use mass::{run_mass_consistency, MassParams};
pub use report::{Criterion, Estimate, ExperimentReport, Table};
pub use stats::{ks_distance, ks_distance_cdf, linear_fit, loglog_fit, weighted_ks, Fit};
pub use thin::{run_thin_volume, ThinParams};
pub use twist::{run_twist_recurrence, TwistParams};

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Names accepted by [`run_by_name`].
pub const EXPERIMENTS: [&str; 6] =
    ["equidistribution", "counting", "mirzakhani-bound", "twist-recurrence", "thin-volume", "mass-consistency"];

fn params<P: DeserializeOwned>(v: Value) -> Result<P> {
    let v = if v.is_null() { Value::Object(Default::default()) } else { v };
    serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("experiment parameters: {e}")))
}

/// Runs an experiment from JSON parameters; `seed` overrides the parameter seed.
pub fn run_by_name(name: &str, p: Value, seed: Option<u64>, exec: Exec) -> Result<ExperimentReport> {
    let started = std::time::Instant::now();
    let mut report = match name {
        "equidistribution" => {
            let mut p: EquidistributionParams = params(p)?;
            if let Some(s) = seed {
                p.seed = s;
                p.target_seed = s.wrapping_add(1);
            }
            run_equidistribution(&p, exec)
        }
        "counting" => {
            let mut p: CountingParams = params(p)?;
            if let Some(s) = seed {
                p.seed = s;
            }
            run_counting(&p, exec)
        }
        "mirzakhani-bound" => run_mirzakhani_bound(&params(p)?, exec),
        "twist-recurrence" => {
            let mut p: TwistParams = params(p)?;
            if let Some(s) = seed {
                p.seed = s;
            }
            run_twist_recurrence(&p, exec)
        }
        "thin-volume" => {
            let mut p: ThinParams = params(p)?;
            if let Some(s) = seed {
                p.seed = s;
            }
            run_thin_volume(&p, exec)
        }
        "mass-consistency" => {
            let mut p: MassParams = params(p)?;
            if let Some(s) = seed {
                p.seed = s;
            }
            run_mass_consistency(&p, exec)
        }
        _ => Err(Error::InvalidInput(format!("unknown experiment `{name}`; expected one of {}", EXPERIMENTS.join(", ")))),
    }?;
    report.wall_time_s = started.elapsed().as_secs_f64();
    Ok(report)
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg.into()))
    }
}
