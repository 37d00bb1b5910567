//! Run configuration: merged from a JSON file and command-line flags,
//! validated against `data/run_config.schema.json`, then defaulted.

use std::sync::OnceLock;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::FNPoint;
use crate::measures::{FdConvention, ModuliSurface};
use crate::topology::{MultiCurveConfig, SurfaceSig};
use crate::volumes::WeightFunction;

pub const SCHEMA: &str = include_str!("../../data/run_config.schema.json");
pub const SCHEMA_VERSION: u32 = 1;

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let schema: Value = serde_json::from_str(SCHEMA).expect("shipped schema is JSON");
        jsonschema::validator_for(&schema).expect("shipped schema is valid")
    })
}

/// Every violation, one per line, as `instance path: message (schema path)`.
pub fn validate(v: &Value) -> Result<()> {
    let errors: Vec<String> = validator()
        .iter_errors(v)
        .map(|e| format!("{}: {} (schema {})", display_path(e.instance_path().as_str()), e, e.schema_path().as_str()))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("config does not match the run-config schema:\n  {}", errors.join("\n  "))))
    }
}

fn display_path(p: &str) -> &str {
    if p.is_empty() {
        "/"
    } else {
        p
    }
}

/// Weight function in the normalized lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FSpec {
    /// Indicator of `∏ [0, hiᵢ]`.
    Box { hi: Vec<f64> },
    Constant { value: f64, lo: Vec<f64>, hi: Vec<f64> },
}

impl FSpec {
    pub fn build(&self) -> Result<WeightFunction> {
        match self {
            FSpec::Box { hi } => Ok(WeightFunction::box_indicator(hi)),
            FSpec::Constant { value, lo, hi } => {
                if lo.len() != hi.len() {
                    return Err(Error::InvalidInput("f: lo and hi differ in length".into()));
                }
                Ok(WeightFunction::constant_on(*value, lo, hi))
            }
        }
    }

    pub fn hi(&self) -> &[f64] {
        match self {
            FSpec::Box { hi } | FSpec::Constant { hi, .. } => hi,
        }
    }
}

/// Integer or `"p/q"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Int(i64),
    Frac(String),
}

impl Weight {
    fn rational(&self) -> Result<Rational64> {
        match self {
            Weight::Int(n) => Ok(Rational64::from_integer(*n)),
            Weight::Frac(s) => s.parse().map_err(|_| Error::InvalidInput(format!("/a: bad weight `{s}`"))),
        }
    }
}

/// Fully materialized run configuration. `thread_count` and `out` never reach
/// the artifacts: they must not change what is written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "version")]
    pub schema_version: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default)]
    pub params: Value,
    #[serde(default = "default_surface")]
    pub surface: String,
    #[serde(default = "default_curve")]
    pub curve: String,
    /// `(ℓ, τ)`; the modular torus when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<FSpec>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Weight>>,
    /// Boundary lengths of the base surface.
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(default)]
    pub conv: FdConvention,
    /// Experiments keep their own seed unless this is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_samples")]
    pub sample_count: usize,
    #[serde(default, skip_serializing)]
    pub thread_count: Option<usize>,
    #[serde(default, skip_serializing)]
    pub out: Option<String>,
}

fn version() -> u32 {
    SCHEMA_VERSION
}
fn default_surface() -> String {
    "1,1".into()
}
fn default_curve() -> String {
    "nonsep".into()
}
fn default_samples() -> usize {
    1000
}

impl RunConfig {
    /// Validates the raw value against the schema, then applies defaults.
    pub fn from_value(v: Value) -> Result<Self> {
        validate(&v)?;
        let mut c: RunConfig = serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        if c.params.is_null() {
            c.params = Value::Object(Default::default());
        }
        Ok(c)
    }

    pub fn surface_sig(&self) -> Result<SurfaceSig> {
        self.surface.parse().map_err(|e: Error| Error::InvalidInput(format!("/surface: {e}")))
    }

    pub fn weights(&self) -> Result<Option<Vec<Rational64>>> {
        self.a.as_ref().map(|a| a.iter().map(Weight::rational).collect()).transpose()
    }

    pub fn multicurve(&self) -> Result<MultiCurveConfig> {
        MultiCurveConfig::new(self.surface_sig()?, &self.curve, self.weights()?)
    }

    pub fn level(&self) -> Result<f64> {
        self.l.ok_or_else(|| Error::InvalidInput("/L: required by this command".into()))
    }

    /// The configured f, or the unit box in the right dimension.
    pub fn weight_spec(&self, k: usize) -> FSpec {
        self.f.clone().unwrap_or(FSpec::Box { hi: vec![1.0; k] })
    }

    /// Boundary lengths of `surface`, zero-padded for punctures.
    pub fn boundary_lengths(&self, s: SurfaceSig) -> Result<Vec<f64>> {
        let n = s.n as usize;
        let b = s.b as usize;
        if self.b.len() != b {
            return Err(Error::InvalidInput(format!("/b: {s} needs {b} boundary lengths, got {}", self.b.len())));
        }
        Ok([vec![0.0; n], self.b.clone()].concat())
    }

    pub fn fn_point(&self) -> Result<FNPoint> {
        let s = self.surface_sig()?;
        let [l, tau] = match self.point {
            Some(p) => p,
            None if s == SurfaceSig::torus() => [crate::geometry::modular_length(), 0.0],
            None => return Err(Error::InvalidInput("/point: required for this surface".into())),
        };
        FNPoint::new(s, vec![l], vec![tau], self.boundary_lengths(s)?)
    }

    pub fn moduli_surface(&self) -> Result<ModuliSurface> {
        let s = self.surface_sig()?;
        let b = self.boundary_lengths(s)?;
        ModuliSurface::from_sig(s, b.last().copied().unwrap_or(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn negative_length_names_the_path() {
        let e = RunConfig::from_value(json!({"command": "curves count", "point": [-1.0, 0.0], "L": 5}))
            .unwrap_err()
            .to_string();
        assert!(e.contains("/point/0"), "{e}");
        assert!(e.contains("exclusiveMinimum"), "{e}");
    }

    #[test]
    fn unknown_keys_and_commands_are_rejected() {
        assert!(RunConfig::from_value(json!({"command": "curves count", "colour": 1})).is_err());
        assert!(RunConfig::from_value(json!({"command": "curves list"})).is_err());
        assert!(RunConfig::from_value(json!({"command": "experiment run"})).is_err());
    }

    #[test]
    fn defaults_are_materialized() {
        let c = RunConfig::from_value(json!({"command": "volumes eval", "L": 3, "thread_count": 4})).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["surface"], "1,1");
        assert_eq!(v["schema_version"], 1);
        assert!(v.get("thread_count").is_none());
        validate(&v).unwrap();
    }

    #[test]
    fn fractional_weights() {
        let c = RunConfig::from_value(json!({"command": "mass horosphere", "a": ["1/2"], "L": 2})).unwrap();
        assert_eq!(c.weights().unwrap().unwrap(), vec![Rational64::new(1, 2)]);
    }
}
