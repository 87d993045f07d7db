//! Circuit quantum electrodynamics of a transmission line resonator whose center
//! conductor is interrupted by a Josephson junction.
//!
//! The junction hybridizes with the antisymmetric line modes and inherits their
//! nonlinearity: this crate computes the eigenmode spectrum, zero-point phase
//! amplitudes, self- and cross-Kerr shifts in the rotating-wave approximation,
//! current fluctuation profiles, and the Bose-Hubbard parameters of capacitively
//! coupled resonator chains. A brute-force Fock-space diagonalization of the
//! full cosine Hamiltonian validates the closed-form results.

pub mod circuit;
pub mod config;
pub mod constants;
pub mod error;
pub mod fock;
pub mod kerr;
pub mod lattice;
pub mod modes;
pub mod pipeline;
pub mod spectrum;

pub use circuit::{derive, table_demo_params, CircuitParams, DerivedParams, ModeParity};
pub use error::{exit_code, Error, Result};
pub use kerr::{kerr_parameters, KerrResult};
pub use modes::{build_modes, Mode, ModeSet};
pub use spectrum::{solve_spectrum, sweep_spectrum, SpectrumResult, SweepResult};
