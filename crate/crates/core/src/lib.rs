//! Densities of states of the two-dimensional harmonic oscillator.
//!
//! The crate computes the exact quantum spectrum in the isotropic,
//! commensurate and incommensurate regimes and the periodic-orbit sums that
//! reproduce it: normal-mode orbits, the isotropic SU(2) family, and the
//! Lissajous family of a commensurate oscillator reduced by its cyclic phase
//! space symmetry. Delta combs are compared after Gaussian broadening, which
//! acts on every periodic-orbit harmonic in closed form.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod oscillator;
pub mod phase;
pub mod series;
pub mod symmetry;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
pub use oscillator::{FrequencyClass, Level, OscillatorConfig};
pub use phase::Phase;
