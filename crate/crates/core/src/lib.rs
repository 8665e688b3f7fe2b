//! Numerical and analytic model of a few-photon optical diode built from two
//! driven cavities coupled by a second-order (χ⁽²⁾) nonlinearity.
//!
//! Mode `a` (frequency ω_a) and mode `b` (ω_b = 2ω_a) exchange one `b` photon
//! for two `a` photons at rate Ω. Either cavity can be driven coherently, and
//! both leak photons into vacuum output channels. The crate provides
//!
//! - [`fock`]: the truncated two-mode Fock space and dense operators on it,
//! - [`dynamics`]: the rotating-frame Hamiltonian, the Lindblad generator,
//!   fixed-step RK4 evolution and the Liouvillian steady state,
//! - [`observables`]: photon numbers, output currents, g²(0), g²(τ) by the
//!   quantum regression construction, and the rectification factor,
//! - [`analytic`]: the eight-level weak-drive amplitude model and the closed
//!   forms derived from it.
//!
//! All rates and detunings are expressed in units of the mode-`b` loss rate κ.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod fock;
mod linalg;
pub mod observables;
pub mod state;

pub use error::{Error, Result};
pub use fock::{FockBasis, Mode, Operator};
pub use dynamics::{ModelParams, Pump};
pub use state::DensityMatrix;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
