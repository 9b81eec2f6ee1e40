//! Closed-form baselines: real-Haar averages, Bell-product spectra and wedge products.

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::combinatorics::{binomial_u128, factorial_u128};
use crate::corrmeas::PuritySpectrum;
use crate::error::{invalid, Result};
use crate::fock::{FockBasis, ModeSet, StateVector, MAX_MODES};
use crate::rng;

fn to_i128(x: u128) -> Result<i128> {
    i128::try_from(x).or_else(|_| invalid("integer overflow in exact Haar average"))
}

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).map_or_else(|| invalid("integer overflow in exact Haar average"), Ok)
}

/// `[C(l,k)C(l-k,n)C(l-k,n-k) + ε C(l,n-k)C(l-n,k)C(l-n+k,k)] / [C(l,n)(C(l,n)+2)]`.
fn binomial_form(l: usize, n: usize, k: usize, eps: i128) -> Result<Ratio<i128>> {
    check_range(l, n, k)?;
    let c = |a: usize, b: usize| binomial_u128(a as u64, b as u64);
    let first = to_i128(mul(mul(c(l, k), c(l - k, n))?, c(l - k, n - k))?)?;
    let second = to_i128(mul(mul(c(l, n - k), c(l - n, k))?, c(l - n + k, k))?)?;
    let d = c(l, n);
    Ok(Ratio::new(first + eps * second, to_i128(mul(d, d + 2)?)?))
}

/// `[k!(l-k)! + ε n!(l-n)!] / [(C(l,n)+2) (k!)² (n-k)! (l-n-k)!]`.
fn factorial_form(l: usize, n: usize, k: usize, eps: i128) -> Result<Ratio<i128>> {
    check_range(l, n, k)?;
    let f = |a: usize| factorial_u128(a as u64);
    let num = to_i128(mul(f(k), f(l - k))?)? + eps * to_i128(mul(f(n), f(l - n))?)?;
    let den = mul(mul(mul(f(k), f(k))?, f(n - k))?, f(l - n - k))?;
    let d = binomial_u128(l as u64, n as u64);
    Ok(Ratio::new(num, to_i128(den)?) / Ratio::from_integer(to_i128(d + 2)?))
}

fn check_range(l: usize, n: usize, k: usize) -> Result<()> {
    if n > l || k > n.min(l - n) || l > MAX_MODES {
        return invalid(format!("need 0 ≤ k ≤ min(n, l-n) with n ≤ l ≤ {MAX_MODES}; got (l, n, k) = ({l}, {n}, {k})"));
    }
    Ok(())
}

fn agreeing(a: Ratio<i128>, b: Ratio<i128>) -> Result<Ratio<i128>> {
    if a != b {
        return Err(crate::Error::Singular(format!("closed forms disagree: {a} vs {b}")));
    }
    Ok(a)
}

/// The literature closed form for the real-Haar `⟨ω_k⟩`, with both of its
/// equivalent expressions evaluated and required to agree exactly.
pub fn haar_average_printed(l: usize, n: usize, k: usize) -> Result<Ratio<i128>> {
    agreeing(binomial_form(l, n, k, 1)?, factorial_form(l, n, k, 1)?)
}

/// Literature closed form as a float; see [`haar_average_printed`].
///
/// For odd `k` this does not equal the true average (see
/// [`haar_average_corrected`]); at `k = 0` it gives `(d+1)/(d+2)` with `d = C(l,n)`.
pub fn haar_average_exact(l: usize, n: usize, k: usize) -> Result<f64> {
    let a = haar_average_printed(l, n, k)?;
    Ok(*a.numer() as f64 / *a.denom() as f64)
}

/// True real-Haar `⟨ω_k⟩`: the second term enters with `(-1)^k`, and `ω_0 = 1`.
///
/// The cross contraction `⟨A|Ψ_I Ψ†_J|B⟩⟨B|Ψ†_I Ψ_J|A⟩` carries the sign
/// `(-1)^k`, which the literature form drops.
pub fn haar_average_corrected(l: usize, n: usize, k: usize) -> Result<Ratio<i128>> {
    let eps = if k % 2 == 0 { 1 } else { -1 };
    let r = agreeing(binomial_form(l, n, k, eps)?, factorial_form(l, n, k, eps)?)?;
    Ok(if k == 0 { Ratio::from_integer(1) } else { r })
}

pub fn ratio_to_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Real Gaussian amplitudes, normalized; uniform on the unit sphere of `R^d`.
pub fn haar_sample(l: usize, n: usize, seed: u64) -> Result<StateVector> {
    haar_sample_from(&mut rng::seeded(seed), l, n)
}

/// Sample `index` of a batch seeded by `seed` (independent ChaCha8 stream).
pub fn haar_sample_stream(l: usize, n: usize, seed: u64, index: u64) -> Result<StateVector> {
    haar_sample_from(&mut rng::seeded_stream(seed, index), l, n)
}

fn haar_sample_from(r: &mut rng::Rng, l: usize, n: usize) -> Result<StateVector> {
    let basis = Arc::new(FockBasis::new(l, n)?);
    StateVector::from_fn(basis, |_| Complex64::new(rng::normal(r), 0.0)).normalized()
}

/// Coefficients of `(1 + x + x²)^copies`.
pub fn bell_coefficients(copies: usize) -> Vec<u128> {
    let mut c = vec![1u128];
    for _ in 0..copies {
        let mut next = vec![0u128; c.len() + 2];
        for (i, &a) in c.iter().enumerate() {
            next[i] += a;
            next[i + 1] += a;
            next[i + 2] += a;
        }
        c = next;
    }
    c
}

/// Spectrum of `|φ⟩^{∧copies}` with `|φ⟩ = (|1,2⟩ + |3,4⟩)/√2` on `l = 4·copies` modes.
pub fn bell_product_spectrum(copies: usize) -> Result<PuritySpectrum> {
    if copies == 0 {
        return invalid("need at least one copy");
    }
    Ok(PuritySpectrum {
        l: 4 * copies,
        n: 2 * copies,
        omegas: bell_coefficients(copies).into_iter().map(|c| c as f64).collect(),
        methods: Vec::new(),
        cross_check: None,
    })
}

/// `(|1,2⟩ + |3,4⟩)/√2`.
pub fn bell_state() -> StateVector {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector::superposition(4, &[(&[1, 2], h), (&[3, 4], h)]).expect("valid Bell state")
}

/// `|v_1⟩ ∧ |v_2⟩ ∧ ..` with part `i` placed on the next `l_i` modes.
///
/// Each part's modes precede the next part's, so the amplitude of `S_1 ∪ S_2' ∪ ..`
/// is the plain product `v_1(S_1) v_2(S_2) ..`.
pub fn embed_product(parts: &[StateVector]) -> Result<StateVector> {
    if parts.is_empty() {
        return invalid("no parts to embed");
    }
    let l: usize = parts.iter().map(StateVector::l).sum();
    let n: usize = parts.iter().map(StateVector::n).sum();
    if l > MAX_MODES {
        return invalid(format!("combined system has {l} modes, limit is {MAX_MODES}"));
    }
    let mut acc: Vec<(ModeSet, Complex64)> = vec![(ModeSet::EMPTY, Complex64::new(1.0, 0.0))];
    let mut offset = 0;
    for part in parts {
        let support: Vec<(ModeSet, Complex64)> =
            part.iter().filter(|(_, a)| *a != Complex64::new(0.0, 0.0)).collect();
        acc = acc
            .iter()
            .flat_map(|&(s, a)| support.iter().map(move |&(t, b)| (s.union(t.shifted(offset)), a * b)))
            .collect();
        offset += part.l();
    }
    let mut out = StateVector::zeros(l, n)?;
    for (s, a) in acc {
        out.set(s, a)?;
    }
    Ok(out)
}

/// `|φ⟩^{∧copies}`.
pub fn bell_product(copies: usize) -> Result<StateVector> {
    embed_product(&vec![bell_state(); copies])
}
