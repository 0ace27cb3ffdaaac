//! Block renormalization of spin-1/2 chains with real-time dynamics.
//!
//! The crate builds transverse-field Ising and open XXZ chains as sums of
//! Pauli strings, performs a single real-space blocking step (two-site
//! blocks for Ising, three-site blocks for XXZ), maps states and
//! observables through the block isometry, evolves both chains with a
//! matrix-free Krylov propagator and measures how closely the coarse
//! dynamics track the original.
//!
//! Basis convention: site 1 is the most significant bit of a basis index
//! and bit value 0 is spin up.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dense;
pub mod density;
pub mod embedding;
pub mod error;
pub mod evolve;
pub mod heisenberg;
pub mod ising;
mod kernels;
pub mod models;
pub mod observables;
pub mod operator;
pub mod state;

pub use error::{Result, SpinError};
pub use evolve::{evolve, EvolveConfig};
pub use models::{build_heisenberg, build_ising, HeisenbergCouplings, IsingCouplings};
pub use operator::{apply_operator, OperatorSum, Pauli, PauliTerm};
pub use state::StateVector;
