//! Tent-tiles of the special Pisot units, their Rauzy fractal descriptions,
//! boundary graphs, boundary dimensions and lattice tilings.

pub mod error;
pub mod boundary;
pub mod geometry;
pub mod linalg;
pub mod numberfield;
pub mod poly;
pub mod rauzy;
pub mod spectral;
pub mod substitution;
pub mod tiling;

pub use error::{Error, Result};
