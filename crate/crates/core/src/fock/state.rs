use std::sync::Arc;

use num_complex::Complex64;

use super::{sign_concat_unchecked, FockBasis, ModeSet};
use crate::error::{invalid, Error, Result};

/// Amplitudes `v(S)` over the `C(l, n)` basis states, in basis rank order.
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return invalid(format!(
                "amplitude vector has length {}, basis dimension is {}",
                amps.len(),
                basis.dim()
            ));
        }
        Ok(StateVector { basis, amps })
    }

    pub fn zeros(l: usize, n: usize) -> Result<Self> {
        let basis = Arc::new(FockBasis::new(l, n)?);
        let amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        Ok(StateVector { basis, amps })
    }

    pub fn zeros_like(&self) -> Self {
        StateVector { basis: self.basis.clone(), amps: vec![Complex64::new(0.0, 0.0); self.amps.len()] }
    }

    /// `|S⟩` for 1-based modes `S`.
    pub fn basis_state(l: usize, modes: &[usize]) -> Result<Self> {
        let s = ModeSet::from_modes(modes)?;
        let mut v = Self::zeros(l, modes.len())?;
        v.set(s, Complex64::new(1.0, 0.0))?;
        Ok(v)
    }

    /// Normalized superposition `Σ_i c_i |S_i⟩` from `(modes, coefficient)` pairs.
    pub fn superposition(l: usize, terms: &[(&[usize], Complex64)]) -> Result<Self> {
        let n = terms.first().map(|t| t.0.len()).ok_or_else(|| Error::InvalidInput("no terms".into()))?;
        let mut v = Self::zeros(l, n)?;
        for (modes, c) in terms {
            let s = ModeSet::from_modes(modes)?;
            let cur = v.amplitude(s);
            v.set(s, cur + c)?;
        }
        v.normalized()
    }

    pub fn from_fn(basis: Arc<FockBasis>, mut f: impl FnMut(ModeSet) -> Complex64) -> Self {
        let amps = basis.iter().map(&mut f).collect();
        StateVector { basis, amps }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn l(&self) -> usize {
        self.basis.l()
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    /// `v(S)`, zero for sets outside this sector.
    pub fn amplitude(&self, s: ModeSet) -> Complex64 {
        self.basis.rank(s).map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    pub fn set(&mut self, s: ModeSet, value: Complex64) -> Result<()> {
        match self.basis.rank(s) {
            Some(i) => {
                self.amps[i] = value;
                Ok(())
            }
            None => invalid(format!("{s} is not a basis state of ({}, {})", self.l(), self.n())),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeSet, Complex64)> + '_ {
        self.basis.iter().zip(self.amps.iter().copied())
    }

    /// Basis states with `|v(S)| > amp_tol`.
    pub fn support(&self, amp_tol: f64) -> impl Iterator<Item = ModeSet> + '_ {
        self.iter().filter(move |(_, a)| a.norm() > amp_tol).map(|(s, _)| s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return invalid("cannot normalize a zero or non-finite state");
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(self)
    }

    /// Errors unless `| ‖v‖ - 1 | ≤ tol`.
    pub fn require_normalized(&self, tol: f64) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tol || !norm.is_finite() {
            return Err(Error::Unnormalized { norm });
        }
        Ok(())
    }

    fn same_sector(&self, other: &StateVector) -> Result<()> {
        if self.l() != other.l() || self.n() != other.n() {
            return invalid(format!(
                "sector mismatch: ({}, {}) vs ({}, {})",
                self.l(),
                self.n(),
                other.l(),
                other.n()
            ));
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_sector(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨a|b⟩| / (‖a‖ ‖b‖)`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        let ov = self.inner(other)?.norm();
        Ok(ov / (self.norm() * other.norm()))
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= c);
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &StateVector) -> Result<()> {
        self.same_sector(other)?;
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.same_sector(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

/// `Ψ†_Q Ψ_P |v⟩`.
///
/// On a basis state, `Ψ†_Q Ψ_P |S⟩ = σ(S∖P, P) σ(S∖P, Q) |S∖P ∪ Q⟩` when
/// `P ⊂ S` and `Q ∩ (S∖P) = ∅`, and zero otherwise.
pub fn apply_monomial(v: &StateVector, q: ModeSet, p: ModeSet) -> Result<StateVector> {
    let l = v.l();
    if !p.fits(l) || !q.fits(l) {
        return invalid(format!("monomial modes {q}/{p} exceed l = {l}"));
    }
    let n_out = v.n() as isize - p.len() as isize + q.len() as isize;
    if n_out < 0 || n_out as usize > l {
        return invalid(format!("resulting particle number {n_out} outside [0, {l}]"));
    }
    let mut out = StateVector::zeros(l, n_out as usize)?;
    let out_basis = out.basis.clone();
    for (s, amp) in v.iter() {
        if amp == Complex64::new(0.0, 0.0) || !p.is_subset_of(s) {
            continue;
        }
        let rest = s.difference(p);
        if !q.is_disjoint(rest) {
            continue;
        }
        let sign = sign_concat_unchecked(rest, p) * sign_concat_unchecked(rest, q);
        let target = out_basis.rank(rest.union(q)).expect("target in output sector");
        out.amps[target] += amp * sign as f64;
    }
    Ok(out)
}
