//! Sample-based Krylov quantum diagonalization, simulated end to end.
//!
//! The crate builds spin and fermionic Hamiltonians, evolves reference
//! states in time, and estimates ground-state energies three ways:
//!
//! * [`krylov`]: projection onto the time-evolved states themselves and a
//!   regularized generalized eigenproblem (KQD), with optional Gaussian
//!   matrix-element noise.
//! * [`sqd`]: projection onto computational-basis bitstrings sampled from
//!   the time-evolved states (SKQD), or from a uniform baseline.
//! * exact diagonalization oracles in [`spin`], [`fermion`] and [`linalg`].
//!
//! [`bounds`] evaluates the analytic error and sampling bounds and checks them
//! numerically; [`experiment`] turns JSON configs into CSV result tables.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod fermion;
pub mod hamiltonian;
pub mod krylov;
pub mod linalg;
pub mod propagate;
pub mod rng;
pub mod spin;
pub mod sqd;
pub mod state;

pub use error::{Error, Result};
pub use hamiltonian::{spectrum_summary, Hamiltonian, SpectrumLimits, SpectrumSummary};
pub use num_complex::Complex64 as C64;
pub use state::{Basis, StateVector};
