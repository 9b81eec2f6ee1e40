//! Exact numerics for classifying fixed-particle-number fermionic states by
//! their k-body correlation content.
//!
//! The central quantity is the twisted purity `ω_k = Tr[ρ_k ρ̃_k]`, the
//! squared norm of `Ω^k |v⟩⊗|v⟩ / k!` with `Ω = Σ_r ψ_r ⊗ ψ†_r`. States with
//! `ω_k = 0` form the nested classes `G_k` (`G_1` are Slater determinants).
//!
//! Modules:
//! - [`fock`]: basis enumeration, sign algebra, monomial action, single-particle rotations
//! - [`corrmeas`]: k-RDMs, twisted k-RDMs and three independent routes to `ω_k`
//! - [`pluecker`]: generalized Plücker residuals, `G_k` membership, CI support diagnostics
//! - [`wick`]: connected amplitudes, the recursive extended Wick rule, `ν(m)` coefficients
//! - [`ansatz`]: the polynomial `v(G)·F(T_1..T_k)|G⟩` ansatz, its generating function, fitting
//! - [`models`]: Hubbard and complex SYK Hamiltonians with dense exact diagonalization
//! - [`analytic`]: Haar averages, Bell-product spectra and wedge products
//! - [`samples`]: seeded random, Slater and CI-radius states
//!
//! Mode labels are 1-based throughout.

pub mod analytic;
pub mod ansatz;
pub mod combinatorics;
pub mod corrmeas;
pub mod error;
pub mod fock;
pub mod models;
pub mod pluecker;
pub mod rng;
pub mod samples;
pub mod wick;

pub use error::{Error, Result};
pub use fock::{FockBasis, ModeSet, StateVector, TensorState};
pub use num_complex::Complex64;
