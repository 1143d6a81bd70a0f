//! Core dynamics of a kicked nonlinear cantilever one-way coupled to a
//! two-level spin, plus the chaos diagnostics built on top of them.
//!
//! The crate is organized in three layers:
//!
//! - [`cantilever`]: the classical side — the area-preserving standard map
//!   in action-angle variables, physical-parameter translation into the
//!   stochasticity `K`, coordinate reconstruction, and ensemble
//!   drift/diffusion estimation;
//! - [`spin`]: the quantum side — per-kick two-level Hamiltonians driven by
//!   the cantilever trajectory, exact Floquet propagators, and a closed-form
//!   spectral (transfer-matrix) construction of the evolved state that
//!   cross-validates the direct product evolution;
//! - [`observables`]: diagnostics — Pauli expectations, density matrices
//!   and relative-entropy coherence, recurrence distances, discrete Fourier
//!   power spectra, level-spacing statistics, Hamiltonian correlations,
//!   recurrence-without-observable-return detection, and freezing runs.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std`
//! feature only switches scalar math from `libm` to the standard library
//! intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod cantilever;
mod error;
mod linalg;
mod math;
pub mod observables;
pub mod spin;

pub use error::{Error, Result};
