//! Construction, certification and simulation of a distributed coherent
//! quantum observer built from a parametric-amplifier block and a chain of
//! optical cavities.
//!
//! The crate is organised bottom-up:
//!
//! - [`system`]: symplectic forms, closed linear quantum systems, and the
//!   realizability / conservation checks shared by everything else.
//! - [`flow`]: matrix exponentials, including an exact spectral propagator
//!   for generators of the form `2ΘR` with `R ≻ 0`.
//! - [`network`]: open systems with labelled field ports and the global
//!   elimination of field interconnections.
//! - [`observer`]: closed-form observer realization (gains, detunings,
//!   `A_o`, `B_o`, `C_o`, coupling Hamiltonian, steady vector).
//! - [`analysis`]: positive-definiteness certificate, the complex Hermitian
//!   reduction and the time-average convergence bound.
//! - [`sim`]: trajectory propagation and time-averaged consensus reports.
//!
//! All state vectors use the interleaved quadrature ordering
//! `(q₁, p₁, q₂, p₂, …)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod network;
pub mod observer;
pub mod sim;
pub mod system;

pub use error::{Error, Result};
