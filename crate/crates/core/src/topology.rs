//! Surface signatures, multicurve types and cut-and-glue data.
//!
//! The supported multicurve types live in `data/configurations.json`, which is
//! compiled into the binary. Constants that are not fixed by a general rule
//! (σ and the stabilizer index) are stored there together with a note saying
//! where each value came from.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Genus, punctures and labeled boundary components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SurfaceSig {
    pub g: u32,
    pub n: u32,
    #[serde(default)]
    pub b: u32,
}

impl SurfaceSig {
    pub fn new(g: u32, n: u32, b: u32) -> Result<Self> {
        let s = SurfaceSig { g, n, b };
        if s.euler() >= 0 {
            return Err(Error::InvalidInput(format!("{s} has non-negative Euler characteristic")));
        }
        Ok(s)
    }

    pub const fn torus() -> Self {
        SurfaceSig { g: 1, n: 1, b: 0 }
    }

    pub const fn holed_torus() -> Self {
        SurfaceSig { g: 1, n: 0, b: 1 }
    }

    pub const fn sphere4() -> Self {
        SurfaceSig { g: 0, n: 4, b: 0 }
    }

    pub fn euler(&self) -> i64 {
        2 - 2 * self.g as i64 - self.n as i64 - self.b as i64
    }

    /// Number of curves in a pants decomposition.
    pub fn complexity(&self) -> i64 {
        3 * self.g as i64 - 3 + self.n as i64 + self.b as i64
    }

    /// Real dimension of Teichmüller space (boundary lengths held fixed).
    pub fn dim(&self) -> i64 {
        6 * self.g as i64 - 6 + 2 * self.n as i64 + 2 * self.b as i64
    }

    pub fn is_pants(&self) -> bool {
        self.g == 0 && self.n + self.b == 3
    }

    /// Surfaces with an explicit holonomy model.
    pub fn has_geometry(&self) -> bool {
        matches!((self.g, self.n, self.b), (1, 1, 0) | (1, 0, 1) | (0, 4, 0))
    }
}

impl fmt::Display for SurfaceSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            write!(f, "S_{{{},{}}}", self.g, self.n)
        } else {
            write!(f, "S_{{{},{}}}^{}", self.g, self.n, self.b)
        }
    }
}

/// Parses `g,n` or `g,n,b`.
impl FromStr for SurfaceSig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let parse = |t: &str| {
            t.parse::<u32>()
                .map_err(|_| Error::InvalidInput(format!("bad surface signature `{s}`")))
        };
        match parts.as_slice() {
            [g, n] => SurfaceSig::new(parse(g)?, parse(n)?, 0),
            [g, n, b] => SurfaceSig::new(parse(g)?, parse(n)?, parse(b)?),
            _ => Err(Error::InvalidInput(format!("bad surface signature `{s}`"))),
        }
    }
}

/// An ordered weighted multicurve type on a base surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiCurveConfig {
    pub base: SurfaceSig,
    /// Key into the configuration table, e.g. `nonsep`.
    pub tag: String,
    pub components: Vec<String>,
    pub weights: Vec<Rational64>,
}

impl MultiCurveConfig {
    /// Looks up the type in the table and attaches weights (all 1 if `None`).
    pub fn new(base: SurfaceSig, tag: &str, weights: Option<Vec<Rational64>>) -> Result<Self> {
        let entry = lookup(base, tag)?;
        let k = entry.components.len();
        let weights = weights.unwrap_or_else(|| vec![Rational64::from_integer(1); k]);
        if weights.len() != k {
            return Err(Error::InvalidInput(format!(
                "{} weights given for a {k}-component multicurve",
                weights.len()
            )));
        }
        if weights.iter().any(|w| *w <= Rational64::from_integer(0)) {
            return Err(Error::InvalidInput("multicurve weights must be positive".into()));
        }
        Ok(MultiCurveConfig { base, tag: tag.to_string(), components: entry.components.clone(), weights })
    }

    /// The single nonseparating curve on the cusped torus, weight 1.
    pub fn torus_curve() -> Self {
        Self::new(SurfaceSig::torus(), "nonsep", None).expect("tabulated")
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|w| *w.numer() as f64 / *w.denom() as f64).collect()
    }

    pub fn with_weights(&self, weights: Vec<Rational64>) -> Result<Self> {
        Self::new(self.base, &self.tag, Some(weights))
    }
}

/// Result of cutting the base surface along the multicurve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutData {
    pub pieces: Vec<SurfaceSig>,
    /// `boundary_map[j][s]` is the component glued to boundary slot `s` of piece `j`.
    pub boundary_map: Vec<Vec<usize>>,
    pub rho: u32,
    pub sigma: Rational64,
    pub stab_index: u32,
}

impl CutData {
    /// ρ recomputed from the pieces: components adjacent to a one-holed torus, counted once.
    pub fn recompute_rho(&self) -> u32 {
        let mut hit: Vec<usize> = self
            .pieces
            .iter()
            .zip(&self.boundary_map)
            .filter(|(p, _)| **p == SurfaceSig::holed_torus())
            .flat_map(|(_, m)| m.iter().copied())
            .collect();
        hit.sort_unstable();
        hit.dedup();
        hit.len() as u32
    }

    pub fn euler(&self) -> i64 {
        self.pieces.iter().map(SurfaceSig::euler).sum()
    }
}

#[derive(Clone, Debug, Deserialize)]
struct PieceRow {
    g: u32,
    n: u32,
    b: u32,
}

#[derive(Clone, Debug, Deserialize)]
pub struct TableEntry {
    pub g: u32,
    pub n: u32,
    pub tag: String,
    pub components: Vec<String>,
    pieces: Vec<PieceRow>,
    boundary_map: Vec<Vec<usize>>,
    rho: u32,
    sigma: String,
    stab_index: u32,
    pub geometry: bool,
    pub provenance: String,
}

#[derive(Debug, Deserialize)]
struct TableFile {
    version: u32,
    entries: Vec<TableEntry>,
}

static TABLE: OnceLock<Vec<TableEntry>> = OnceLock::new();

/// Version of the shipped configuration table.
pub const TABLE_VERSION: u32 = 1;

pub fn table() -> &'static [TableEntry] {
    TABLE.get_or_init(|| {
        let file: TableFile = serde_json::from_str(include_str!("../data/configurations.json"))
            .expect("configuration table parses");
        assert_eq!(file.version, TABLE_VERSION);
        file.entries
    })
}

fn lookup(base: SurfaceSig, tag: &str) -> Result<&'static TableEntry> {
    if base.b != 0 {
        return Err(Error::UnsupportedConfiguration(format!("{base} is not a base surface")));
    }
    table()
        .iter()
        .find(|e| e.g == base.g && e.n == base.n && e.tag == tag)
        .ok_or_else(|| Error::UnsupportedConfiguration(format!("{base} with curve type `{tag}`")))
}

pub fn table_entry(config: &MultiCurveConfig) -> Result<&'static TableEntry> {
    lookup(config.base, &config.tag)
}

fn parse_rational(s: &str) -> Rational64 {
    s.parse().expect("rational constant in table")
}

pub fn cut_surface(config: &MultiCurveConfig) -> Result<CutData> {
    let e = table_entry(config)?;
    let pieces = e
        .pieces
        .iter()
        .map(|p| SurfaceSig { g: p.g, n: p.n, b: p.b })
        .collect();
    Ok(CutData {
        pieces,
        boundary_map: e.boundary_map.clone(),
        rho: e.rho,
        sigma: parse_rational(&e.sigma),
        stab_index: e.stab_index,
    })
}

/// `(σ, [Stab(γ):Stab₀(γ)])`.
pub fn symmetry_constants(config: &MultiCurveConfig) -> Result<(Rational64, u32)> {
    let c = cut_surface(config)?;
    Ok((c.sigma, c.stab_index))
}
