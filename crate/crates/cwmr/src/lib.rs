//! Standard-library companion to `cwmr-core`: analytic test fields with exact
//! cell-average sampling, the prediction-error experiment protocol, PGM/PPM
//! image I/O, and the per-channel compression pipeline used by the CLI.

pub mod fields;
pub mod harness;
pub mod image;
pub mod quad;
