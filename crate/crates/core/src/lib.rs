//! Numerical laboratory for horoball and horosphere measures on moduli spaces
//! of hyperbolic surfaces.
//!
//! The crate covers the whole pipeline: multicurve combinatorics
//! ([`topology`]), explicit hyperbolic geometry of the complexity-one surfaces
//! ([`geometry`]), simple-geodesic counting and the Thurston measure
//! ([`counting`]), exact Weil–Petersson volume polynomials and masses
//! ([`volumes`]), samplers ([`measures`]) and the experiment harness
//! ([`experiments`]).

pub mod error;
pub mod exec;
pub mod geometry;
pub mod topology;
pub mod counting;
pub mod volumes;
pub mod measures;
pub mod experiments;
pub mod cli;

pub use error::{Error, Result};
