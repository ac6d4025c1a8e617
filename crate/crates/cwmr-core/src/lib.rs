//! Cell-average multiresolution analysis on uniform dyadic 2D grids.
//!
//! A fine grid of cell averages is split into a coarse grid (quarter-sum
//! decimation) plus per-level detail coefficients: the errors of a prediction
//! operator that estimates the four fine children of every coarse cell. Three
//! prediction operators are provided — a linear tensor-product filter, a
//! classical bivariate WENO combination of nine sub-stencil filters, and a
//! progressive WENO recursion that re-weights sub-stencils stage by stage —
//! all built on the primitive-function (double cumulative sum)
//! correspondence between cell averages and point values.
//!
//! The crate is `no_std` + `alloc`; IO, test fields, and the CLI live in the
//! companion `cwmr` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod codec;
pub mod error;
pub mod filters;
pub mod grid;
pub mod mra;
pub mod predictor;
mod ratpoly;
pub mod smoothness;

pub use error::Error;
pub use grid::{BoundaryPolicy, CellGrid, Domain, PrimitiveGrid};
pub use mra::{DetailLevel, MRRepresentation, Metrics, ThresholdSchedule};
pub use predictor::{Epsilon, Predictor, PredictorKind, WenoParams};

/// Re-export of the exact rational type used by filter and smoothness-form
/// construction, so downstream code can inspect generated tables exactly.
pub use num_rational::BigRational;
