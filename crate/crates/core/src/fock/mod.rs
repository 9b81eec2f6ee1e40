//! Fixed-particle-number fermionic Fock space.
//!
//! Basis states are `|S⟩ = ψ†_{s_n}..ψ†_{s_1}|∅⟩` for ascending `S = (s_1..s_n)`.
//! With this ordering `Ψ†_B|A⟩ = σ(A,B)|A∪B⟩` and `Ψ_B|A⟩ = σ(A∖B,B)|A∖B⟩`,
//! where `Ψ_B = ψ_{b_1}..ψ_{b_k}` and `σ` is the sign of the permutation sorting a
//! concatenation.

mod basis;
pub mod io;
mod modeset;
mod rotation;
mod sign;
mod state;
mod tensor;

pub use basis::FockBasis;
pub use modeset::{ModeSet, MAX_MODES};
pub use rotation::{
    apply_mode_unitary, givens_decompose, mode_unitary, single_particle_rotate, GivensRotation,
};
pub use sign::{annihilate, create, sign_chain, sign_concat, sign_concat_unchecked, sign_sort};
pub use state::{apply_monomial, StateVector};
pub use tensor::{omega_power_apply, TensorState};
