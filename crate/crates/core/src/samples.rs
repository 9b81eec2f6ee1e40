//! Seeded test-state generators.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fock::{mode_unitary, single_particle_rotate, FockBasis, ModeSet, StateVector};
use crate::rng;

/// Normalized state with i.i.d. complex Gaussian amplitudes.
pub fn random_state(l: usize, n: usize, seed: u64) -> Result<StateVector> {
    let mut r = rng::seeded(seed);
    let basis = Arc::new(FockBasis::new(l, n)?);
    StateVector::from_fn(basis, |_| rng::complex_normal(&mut r, 1.0)).normalized()
}

/// `exp(iθ)` for a random Hermitian `θ` with entries of order `scale`.
pub fn random_mode_unitary(l: usize, scale: f64, seed: u64) -> Result<DMatrix<Complex64>> {
    let mut r = rng::seeded(seed);
    mode_unitary(&rng::random_hermitian(&mut r, l, scale))
}

/// Random single-particle rotation of `v`.
pub fn randomly_rotated(v: &StateVector, scale: f64, seed: u64) -> Result<StateVector> {
    let mut r = rng::seeded(seed);
    single_particle_rotate(v, &rng::random_hermitian(&mut r, v.l(), scale))
}

/// Random state supported on `|S△S₀| < k`; it lies in `G_k`.
pub fn ci_state(l: usize, n: usize, s0: ModeSet, k: usize, seed: u64) -> Result<StateVector> {
    if s0.len() != n || !s0.fits(l) {
        return invalid(format!("reference {s0} is not an n = {n} subset of [{l}]"));
    }
    if k == 0 {
        return invalid("radius bound k must be positive");
    }
    let mut r = rng::seeded(seed);
    let basis = Arc::new(FockBasis::new(l, n)?);
    StateVector::from_fn(basis, |s| {
        let z = rng::complex_normal(&mut r, 1.0);
        if s.symmetric_difference(s0).len() < k {
            z
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .normalized()
}

/// [`ci_state`] around `{1..n}` followed by a random rotation.
pub fn rotated_ci_state(l: usize, n: usize, k: usize, scale: f64, seed: u64) -> Result<StateVector> {
    let v = ci_state(l, n, ModeSet::range(1, n), k, seed)?;
    randomly_rotated(&v, scale, seed.wrapping_add(0x9e37_79b9))
}

/// Random Slater determinant: a rotated basis state.
pub fn random_slater(l: usize, n: usize, seed: u64) -> Result<StateVector> {
    rotated_ci_state(l, n, 1, 1.0, seed)
}
