//! Averaged dynamics of a spherical pendulum whose suspension point vibrates
//! fast and periodically.
//!
//! - [`excitation`]: pivot motion as Fourier series and its velocity moments.
//! - [`dynamics`]: the full time-dependent Hamiltonian, its average, the reduced
//!   one-degree-of-freedom flow, an RK4 integrator and the full-vs-averaged
//!   comparison harness.
//! - [`potential`]: the effective potential, its equilibria, the critical
//!   curve and domain classification in the `(A - C, B)` plane.
//! - [`portrait`]: phase-portrait grids, level-set extraction and SVG output.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod excitation;
pub mod portrait;
pub mod potential;

pub use error::{Error, Result};
