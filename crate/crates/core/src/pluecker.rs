//! Generalized Plücker residuals and configuration-interaction diagnostics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{binomial_u128, subsets_of_size};
use crate::corrmeas::{twisted_purity, Method};
use crate::error::{invalid, Error, Result};
use crate::fock::{sign_concat_unchecked, FockBasis, ModeSet, StateVector};

pub const DEFAULT_AMP_TOL: f64 = 1e-12;

/// `c_{A,B} = Σ_{R ⊂ B∖A, |R|=k} v(A∪R) v(B∖R) σ(A,R) σ(B∖R,R)`.
pub fn residual_component(v: &StateVector, a: ModeSet, b: ModeSet, k: usize) -> Result<Complex64> {
    let (l, n) = (v.l(), v.n());
    if k > n || a.len() + k != n || b.len() != n + k {
        return invalid(format!("need |A| = n-k and |B| = n+k (n = {n}, k = {k}, |A| = {}, |B| = {})", a.len(), b.len()));
    }
    if !a.fits(l) || !b.fits(l) {
        return invalid(format!("sets {a}, {b} exceed l = {l}"));
    }
    Ok(component_unchecked(v, a, b, k))
}

fn component_unchecked(v: &StateVector, a: ModeSet, b: ModeSet, k: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for r in subsets_of_size(b.difference(a).bits(), k) {
        let r = ModeSet::from_bits(r);
        let left = v.amplitude(a.union(r));
        if left == Complex64::new(0.0, 0.0) {
            continue;
        }
        let rest = b.difference(r);
        let right = v.amplitude(rest);
        let sign = sign_concat_unchecked(a, r) * sign_concat_unchecked(rest, r);
        acc += left * right * sign as f64;
    }
    acc
}

/// `Σ_{A,B} |c_{A,B}|²`, summed pair by pair.
pub fn residual_norm_sq(v: &StateVector, k: usize) -> Result<f64> {
    let (l, n) = (v.l(), v.n());
    if k > n || n + k > l {
        return Ok(0.0);
    }
    let lower = FockBasis::new(l, n - k)?;
    let upper = FockBasis::new(l, n + k)?;
    let total = lower
        .states()
        .par_iter()
        .map(|&a| {
            let a = ModeSet::from_bits(a);
            upper
                .iter()
                .filter(|b| b.difference(a).len() >= k)
                .map(|b| component_unchecked(v, a, b, k).norm_sqr())
                .sum::<f64>()
        })
        .sum();
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub omega: f64,
}

/// `v ∈ G_k` iff `ω_k(v) < tol`.
pub fn is_in_gk(v: &StateVector, k: usize, tol: f64) -> Result<Membership> {
    if tol <= 0.0 {
        return invalid("tolerance must be positive");
    }
    let omega = twisted_purity(v, k, Method::auto(k))?;
    Ok(Membership { member: omega < tol, omega })
}

fn support_bits(v: &StateVector, amp_tol: f64) -> Result<Vec<u32>> {
    if amp_tol < 0.0 {
        return invalid("amplitude tolerance must be nonnegative");
    }
    let s: Vec<u32> = v.support(amp_tol).map(ModeSet::bits).collect();
    if s.is_empty() {
        return Err(Error::EmptySupport);
    }
    Ok(s)
}

/// `max ½|S₁△S₂|` over the numerical support.
pub fn support_diameter(v: &StateVector, amp_tol: f64) -> Result<usize> {
    let s = support_bits(v, amp_tol)?;
    let d = s
        .par_iter()
        .enumerate()
        .map(|(i, &x)| s[i + 1..].iter().map(|&y| (x ^ y).count_ones()).max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    Ok(d as usize / 2)
}

/// `max |S△S₀|` over the numerical support.
pub fn support_radius(v: &StateVector, s0: ModeSet, amp_tol: f64) -> Result<usize> {
    if s0.len() != v.n() || !s0.fits(v.l()) {
        return invalid(format!("reference {s0} is not an n = {} subset of [{}]", v.n(), v.l()));
    }
    let s = support_bits(v, amp_tol)?;
    Ok(s.iter().map(|&x| (x ^ s0.bits()).count_ones() as usize).max().unwrap_or(0))
}

/// `Σ_{r=0}^{⌊k/2⌋} C(n,r) C(l-n,r)`.
pub fn ci_dimension(l: usize, n: usize, k: usize) -> u128 {
    (0..=k / 2).map(|r| binomial_u128(n as u64, r as u64) * binomial_u128((l - n) as u64, r as u64)).sum()
}
